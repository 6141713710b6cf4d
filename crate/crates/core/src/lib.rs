//! Simulation of an organization of distributed hill-climbing agents on
//! correlated NK-style task landscapes.
//!
//! Each agent controls one block of an `M = N * P` bit decision vector. It
//! balances a linear pay-for-performance incentive against compliance with
//! social norms that emerge from the decisions its ring neighbours share,
//! using a goal-programming choice rule over single-bit moves.
//!
//! Modules:
//! - [`landscape`]: interaction structures, correlated contribution tables,
//!   performance evaluation and exhaustive global maxima.
//! - [`orgsim`]: agents, norm memory, the decision rule and the synchronous
//!   per-period scheduler.
//! - [`experiment`]: scenario grids, seeded repetitions, normalization and
//!   the distance-to-maximum summary.
//! - [`config`] and [`output`]: the command-line configuration document and
//!   CSV writers.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod landscape;
pub mod orgsim;
pub mod output;
pub mod seed;

pub use experiment::{
    expand_grid, run_grid, run_once, summarize, Coupling, GridConfig, ModelParams, RunResult,
    Scenario, ScenarioReport, ScenarioSummary,
};
pub use landscape::{compute_global_max, InteractionStructure, Landscape, LandscapeError, OrgState};
pub use orgsim::{
    AgentSpec, GoalWeights, Goals, IncentiveScheme, NormMemory, Organization, RingNetwork,
    SimError, SocialNetwork,
};
