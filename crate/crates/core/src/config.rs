//! Scenario-grid configuration documents (TOML).
//!
//! Every key is optional; missing keys take the default grid of 48
//! scenarios. Unknown keys are rejected.
//!
//! ```toml
//! seed = 20210000
//! runs = 300
//! workers = 4
//! out_dir = "results"
//! emit_series = false
//! paired_landscapes = true
//!
//! [model]
//! tasks_per_agent = 4   # N
//! agents = 4            # P
//! social_tasks = 2      # N_s
//! network_degree = 2    # D
//! periods = 500         # T
//! memory_span = 20      # T_L
//! goals = [1.0, 1.0]    # [g_inc, g_soc]
//!
//! [grid]
//! couplings = [[3, 0, 0], [1, 1, 1], [2, 2, 2], [3, 4, 3]]   # [K, C, S]
//! weights = [[1.0, 0.0], [0.7, 0.3], [0.5, 0.5]]             # [w_inc, w_soc]
//! schemes = [[1.0, 0.0], [0.75, 0.25], [0.5, 0.5], [0.25, 0.75]]  # [alpha, beta]
//! rho = [0.3]
//! ```

use std::path::PathBuf;

use serde::Deserialize;
use thiserror::Error;

use crate::experiment::{expand_grid, Coupling, ExperimentError, GridConfig, ModelParams};
use crate::landscape::LandscapeError;
use crate::orgsim::{GoalWeights, Goals, IncentiveScheme};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid `{key}`: {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

/// Execution options that are not part of a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub runs: usize,
    pub workers: usize,
    pub out_dir: PathBuf,
    pub emit_series: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            runs: 300,
            workers: default_workers(),
            out_dir: PathBuf::from("results"),
            emit_series: false,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    seed: Option<u64>,
    runs: Option<usize>,
    workers: Option<usize>,
    out_dir: Option<PathBuf>,
    emit_series: Option<bool>,
    paired_landscapes: Option<bool>,
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    grid: GridSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelSection {
    tasks_per_agent: Option<usize>,
    agents: Option<usize>,
    social_tasks: Option<usize>,
    network_degree: Option<usize>,
    periods: Option<u32>,
    memory_span: Option<u32>,
    goals: Option<[f64; 2]>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    couplings: Option<Vec<[usize; 3]>>,
    weights: Option<Vec<[f64; 2]>>,
    schemes: Option<Vec<[f64; 2]>>,
    rho: Option<Vec<f64>>,
}

/// Parses and validates a configuration document.
pub fn parse_config(document: &str) -> Result<(GridConfig, RunConfig), ConfigError> {
    let doc: Document = toml::from_str(document)?;
    let defaults = GridConfig::default();
    let run_defaults = RunConfig::default();
    let dm = &defaults.model;

    let goals = doc.model.goals.map_or(dm.goals, |[incentive, social]| Goals { incentive, social });
    let model = ModelParams {
        tasks_per_agent: doc.model.tasks_per_agent.unwrap_or(dm.tasks_per_agent),
        agents: doc.model.agents.unwrap_or(dm.agents),
        social_tasks: doc.model.social_tasks.unwrap_or(dm.social_tasks),
        network_degree: doc.model.network_degree.unwrap_or(dm.network_degree),
        periods: doc.model.periods.unwrap_or(dm.periods),
        memory_span: doc.model.memory_span.unwrap_or(dm.memory_span),
        goals,
    };

    let couplings = match doc.grid.couplings {
        Some(list) => list.into_iter().map(|[k, c, s]| Coupling::new(k, c, s)).collect(),
        None => defaults.couplings.clone(),
    };
    let weights = match doc.grid.weights {
        Some(list) => list
            .into_iter()
            .enumerate()
            .map(|(i, [inc, soc])| parse_weights(i, inc, soc))
            .collect::<Result<_, _>>()?,
        None => defaults.weights.clone(),
    };
    let schemes = match doc.grid.schemes {
        Some(list) => list
            .into_iter()
            .enumerate()
            .map(|(i, [alpha, beta])| {
                IncentiveScheme::new(alpha, beta).map_err(|e| invalid(format!("grid.schemes[{i}]"), e.to_string()))
            })
            .collect::<Result<_, _>>()?,
        None => defaults.schemes.clone(),
    };

    let grid = GridConfig {
        couplings,
        weights,
        schemes,
        rhos: doc.grid.rho.unwrap_or_else(|| defaults.rhos.clone()),
        model,
        seed: doc.seed.unwrap_or(defaults.seed),
        paired_landscapes: doc.paired_landscapes.unwrap_or(defaults.paired_landscapes),
    };
    let run = RunConfig {
        runs: doc.runs.unwrap_or(run_defaults.runs),
        workers: doc.workers.unwrap_or(run_defaults.workers),
        out_dir: doc.out_dir.unwrap_or(run_defaults.out_dir),
        emit_series: doc.emit_series.unwrap_or(run_defaults.emit_series),
    };
    validate(&grid, &run)?;
    Ok((grid, run))
}

fn parse_weights(i: usize, inc: f64, soc: f64) -> Result<GoalWeights, ConfigError> {
    let key = format!("grid.weights[{i}]");
    let w = GoalWeights::new(inc, soc).map_err(|e| invalid(&key, e.to_string()))?;
    if (inc + soc - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(invalid(key, format!("w_inc + w_soc = 1 (got {})", inc + soc)));
    }
    Ok(w)
}

/// Checks the bounds that [`expand_grid`] enforces and names the key.
pub fn validate(grid: &GridConfig, run: &RunConfig) -> Result<(), ConfigError> {
    if run.runs == 0 {
        return Err(invalid("runs", "R >= 1"));
    }
    if run.workers == 0 {
        return Err(invalid("workers", "worker budget >= 1"));
    }
    for (i, c) in grid.couplings.iter().enumerate() {
        let n = grid.model.tasks_per_agent;
        let p = grid.model.agents;
        let key = format!("grid.couplings[{i}]");
        if c.k >= n {
            return Err(invalid(key, format!("K < N (K={}, N={n})", c.k)));
        }
        if c.c > n {
            return Err(invalid(key, format!("C <= N (C={}, N={n})", c.c)));
        }
        if c.s >= p {
            return Err(invalid(key, format!("S < P (S={}, P={p})", c.s)));
        }
    }
    for (i, &rho) in grid.rhos.iter().enumerate() {
        if !(0.0..=1.0).contains(&rho) {
            return Err(invalid(format!("grid.rho[{i}]"), format!("0 <= rho <= 1 (got {rho})")));
        }
    }
    match expand_grid(grid) {
        Ok(_) => Ok(()),
        Err(ExperimentError::EmptyDimension(dim)) => Err(invalid(format!("grid.{dim}"), "at least one value")),
        Err(ExperimentError::InvalidModel(msg)) => Err(invalid("model", msg)),
        Err(ExperimentError::Sim(e)) => Err(invalid("model", e.to_string())),
        Err(ExperimentError::Landscape(e @ LandscapeError::InvalidParameter { .. })) => {
            Err(invalid("grid.couplings", e.to_string()))
        }
        Err(e) => Err(invalid("grid", e.to_string())),
    }
}

/// Command-line overrides applied on top of a parsed document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overrides {
    pub runs: Option<usize>,
    pub periods: Option<u32>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub out_dir: Option<PathBuf>,
    pub emit_series: bool,
    pub paired_landscapes: Option<bool>,
}

impl Overrides {
    pub fn apply(&self, grid: &mut GridConfig, run: &mut RunConfig) -> Result<(), ConfigError> {
        if let Some(r) = self.runs {
            run.runs = r;
        }
        if let Some(t) = self.periods {
            grid.model.periods = t;
        }
        if let Some(s) = self.seed {
            grid.seed = s;
        }
        if let Some(w) = self.workers {
            run.workers = w;
        }
        if let Some(dir) = &self.out_dir {
            run.out_dir = dir.clone();
        }
        run.emit_series |= self.emit_series;
        if let Some(p) = self.paired_landscapes {
            grid.paired_landscapes = p;
        }
        validate(grid, run)
    }
}
