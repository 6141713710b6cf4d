//! Agents and the organization-level scheduler.
//!
//! Each period every agent flips one random bit of its previous block,
//! scores both the status quo and the candidate against the other agents'
//! previous blocks, and keeps the option with the lower weighted goal
//! under-achievement. After all agents decided, each shares its implemented
//! social bits with its network neighbours.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::landscape::{low_mask, Landscape, OrgState};
use crate::seed::{derive_seed, TAG_AGENT_BASE};

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("residual performance needs at least 2 agents, got {0}")]
    NoResidual(usize),
    #[error("incentive shares alpha={alpha}, beta={beta} must be non-negative and sum to 1")]
    InvalidScheme { alpha: f64, beta: f64 },
    #[error("goal weights w_inc={incentive}, w_soc={social} must be non-negative")]
    InvalidWeights { incentive: f64, social: f64 },
    #[error("{0} social tasks exceed the block width {1}")]
    TooManySocialTasks(usize, usize),
    #[error("unsupported network: {0}")]
    UnsupportedNetwork(String),
    #[error("memory span must be at least 1 period")]
    EmptyMemorySpan,
    #[error("expected {expected} agents, got {found}")]
    AgentCount { expected: usize, found: usize },
}

const SHARE_TOLERANCE: f64 = 1e-9;

/// Shares of own and residual performance in the linear incentive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncentiveScheme {
    alpha: f64,
    beta: f64,
}

impl IncentiveScheme {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, SimError> {
        let ok = alpha >= 0.0 && beta >= 0.0 && (alpha + beta - 1.0).abs() <= SHARE_TOLERANCE;
        if !ok {
            return Err(SimError::InvalidScheme { alpha, beta });
        }
        Ok(Self { alpha, beta })
    }

    /// Pure individual pay, `(1, 0)`.
    pub fn individual() -> Self {
        Self { alpha: 1.0, beta: 0.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalWeights {
    incentive: f64,
    social: f64,
}

impl GoalWeights {
    pub fn new(incentive: f64, social: f64) -> Result<Self, SimError> {
        if !(incentive >= 0.0 && social >= 0.0) {
            return Err(SimError::InvalidWeights { incentive, social });
        }
        Ok(Self { incentive, social })
    }

    /// `(1, 0)`: norms are ignored.
    pub fn incentive_only() -> Self {
        Self {
            incentive: 1.0,
            social: 0.0,
        }
    }

    pub fn incentive(&self) -> f64 {
        self.incentive
    }

    pub fn social(&self) -> f64 {
        self.social
    }
}

/// Aspiration levels for the incentive and for norm compliance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Goals {
    pub incentive: f64,
    pub social: f64,
}

impl Default for Goals {
    fn default() -> Self {
        Self {
            incentive: 1.0,
            social: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSpec {
    pub index: usize,
    pub scheme: IncentiveScheme,
    pub weights: GoalWeights,
    pub goals: Goals,
    /// The last `n_social` tasks of the block are social.
    pub n_social: usize,
}

impl AgentSpec {
    /// Social bits of an `width`-bit block, as the low bits of the result.
    pub fn social_bits(&self, block: u64, width: usize) -> u64 {
        block.checked_shr((width - self.n_social) as u32).unwrap_or(0) & low_mask(self.n_social)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryEntry {
    pub source: usize,
    pub bits: u64,
    pub received: u32,
}

/// Social bits received from fellow agents during the last `span` periods.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormMemory {
    span: u32,
    entries: VecDeque<MemoryEntry>,
}

impl NormMemory {
    pub fn new(span: u32) -> Result<Self, SimError> {
        if span == 0 {
            return Err(SimError::EmptyMemorySpan);
        }
        Ok(Self {
            span,
            entries: VecDeque::new(),
        })
    }

    pub fn span(&self) -> u32 {
        self.span
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &MemoryEntry> {
        self.entries.iter()
    }

    pub fn record(&mut self, source: usize, bits: u64, period: u32) {
        self.entries.push_back(MemoryEntry {
            source,
            bits,
            received: period,
        });
    }

    /// Drops entries received in period `now - span` or earlier.
    pub fn evict(&mut self, now: u32) {
        let Some(cutoff) = now.checked_sub(self.span) else {
            return;
        };
        self.entries.retain(|e| e.received > cutoff);
    }
}

/// Mean own performance of every agent other than `agent`.
pub fn residual_performance(lsc: &Landscape, agent: usize, x: OrgState) -> Result<f64, SimError> {
    let agents = lsc.structure().agents();
    if agents < 2 {
        return Err(SimError::NoResidual(agents));
    }
    Ok(residual_from(&lsc.agent_performances(x), agent))
}

fn residual_from(perfs: &[f64], agent: usize) -> f64 {
    let sum: f64 = perfs
        .iter()
        .enumerate()
        .filter(|&(q, _)| q != agent)
        .map(|(_, v)| v)
        .sum();
    sum / (perfs.len() - 1) as f64
}

/// `alpha * own + beta * residual`.
pub fn incentive(spec: &AgentSpec, lsc: &Landscape, x: OrgState) -> Result<f64, SimError> {
    let perfs = lsc.agent_performances(x);
    if perfs.len() < 2 {
        return Err(SimError::NoResidual(perfs.len()));
    }
    Ok(spec.scheme.alpha * perfs[spec.index] + spec.scheme.beta * residual_from(&perfs, spec.index))
}

/// Match rate between `social_bits` and the remembered social bits.
///
/// Zero while `t <= span` (no norm has formed yet), and zero for an empty
/// memory or no social tasks.
pub fn norm_compliance(mem: &NormMemory, social_bits: u64, n_social: usize, t: u32) -> f64 {
    if t <= mem.span || mem.is_empty() || n_social == 0 {
        return 0.0;
    }
    let mask = low_mask(n_social);
    let matches: u64 = mem
        .entries
        .iter()
        .map(|e| n_social as u64 - ((social_bits ^ e.bits) & mask).count_ones() as u64)
        .sum();
    matches as f64 / (n_social * mem.len()) as f64
}

/// Flips one uniformly chosen bit of an `width`-bit block.
pub fn propose_candidate<R: Rng + ?Sized>(own_prev: u64, width: usize, rng: &mut R) -> u64 {
    own_prev ^ (1 << rng.random_range(0..width))
}

/// `(d_soc, d_inc)` for the option whose block for `spec.index` is already
/// placed in `x_option`.
pub fn underachievements(
    spec: &AgentSpec,
    lsc: &Landscape,
    mem: &NormMemory,
    x_option: OrgState,
    t: u32,
) -> Result<(f64, f64), SimError> {
    let width = lsc.structure().tasks_per_agent();
    let block = x_option.block(spec.index, width);
    let compliance = norm_compliance(mem, spec.social_bits(block, width), spec.n_social, t);
    let d_soc = (spec.goals.social - compliance).max(0.0);
    let d_inc = (spec.goals.incentive - incentive(spec, lsc, x_option)?).max(0.0);
    Ok((d_soc, d_inc))
}

fn weighted_underachievement(
    spec: &AgentSpec,
    lsc: &Landscape,
    mem: &NormMemory,
    x_option: OrgState,
    t: u32,
) -> Result<f64, SimError> {
    let (d_soc, d_inc) = underachievements(spec, lsc, mem, x_option, t)?;
    Ok(spec.weights.social * d_soc + spec.weights.incentive * d_inc)
}

/// Goal-programming choice between the status quo and the candidate block,
/// both evaluated against `others_prev`. Exact ties keep the status quo.
pub fn decide(
    spec: &AgentSpec,
    lsc: &Landscape,
    mem: &NormMemory,
    status_quo: u64,
    candidate: u64,
    others_prev: OrgState,
    t: u32,
) -> Result<u64, SimError> {
    let width = lsc.structure().tasks_per_agent();
    let keep = weighted_underachievement(
        spec,
        lsc,
        mem,
        others_prev.with_block(spec.index, width, status_quo),
        t,
    )?;
    let switch = weighted_underachievement(
        spec,
        lsc,
        mem,
        others_prev.with_block(spec.index, width, candidate),
        t,
    )?;
    Ok(if switch < keep { candidate } else { status_quo })
}

/// Who shares social bits with whom.
pub trait SocialNetwork: Send + Sync {
    fn agents(&self) -> usize;
    /// Agents that receive `agent`'s shared bits.
    fn receivers(&self, agent: usize) -> &[usize];
    /// Agents whose shared bits `agent` receives.
    fn senders(&self, agent: usize) -> &[usize];
}

/// Bidirectional ring: agent `p` exchanges with `p - 1` and `p + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingNetwork {
    neighbours: Vec<[usize; 2]>,
}

impl RingNetwork {
    pub fn new(agents: usize, degree: usize) -> Result<Self, SimError> {
        if degree != 2 {
            return Err(SimError::UnsupportedNetwork(format!(
                "ring networks have degree 2, got {degree}"
            )));
        }
        if agents < 3 {
            return Err(SimError::UnsupportedNetwork(format!(
                "a degree-2 ring needs at least 3 agents, got {agents}"
            )));
        }
        let neighbours = (0..agents)
            .map(|p| [(p + agents - 1) % agents, (p + 1) % agents])
            .collect();
        Ok(Self { neighbours })
    }
}

impl SocialNetwork for RingNetwork {
    fn agents(&self) -> usize {
        self.neighbours.len()
    }

    fn receivers(&self, agent: usize) -> &[usize] {
        &self.neighbours[agent]
    }

    // The ring is symmetric.
    fn senders(&self, agent: usize) -> &[usize] {
        &self.neighbours[agent]
    }
}

/// One synchronous period.
///
/// Every agent in `order` proposes a candidate from `state_prev` with its
/// own RNG stream and decides against `state_prev`; the decisions are then
/// assembled into the new state and each agent's implemented social bits
/// are delivered to its receivers, stamped `t`. Memories evict entries older
/// than their span afterwards.
#[allow(clippy::too_many_arguments)]
pub fn step_organization_in_order(
    state_prev: OrgState,
    agents: &[AgentSpec],
    memories: &mut [NormMemory],
    lsc: &Landscape,
    network: &dyn SocialNetwork,
    t: u32,
    rngs: &mut [ChaCha8Rng],
    order: &[usize],
) -> Result<OrgState, SimError> {
    let width = lsc.structure().tasks_per_agent();
    let mut next = state_prev;
    for &p in order {
        let spec = &agents[p];
        let status_quo = state_prev.block(p, width);
        let candidate = propose_candidate(status_quo, width, &mut rngs[p]);
        let chosen = decide(spec, lsc, &memories[p], status_quo, candidate, state_prev, t)?;
        next = next.with_block(p, width, chosen);
    }
    for (p, spec) in agents.iter().enumerate() {
        let shared = spec.social_bits(next.block(p, width), width);
        for &q in network.receivers(p) {
            memories[q].record(p, shared, t);
        }
    }
    for mem in memories.iter_mut() {
        mem.evict(t);
    }
    Ok(next)
}

/// [`step_organization_in_order`] over agents `0..P`.
pub fn step_organization(
    state_prev: OrgState,
    agents: &[AgentSpec],
    memories: &mut [NormMemory],
    lsc: &Landscape,
    network: &dyn SocialNetwork,
    t: u32,
    rngs: &mut [ChaCha8Rng],
) -> Result<OrgState, SimError> {
    let order: Vec<usize> = (0..agents.len()).collect();
    step_organization_in_order(state_prev, agents, memories, lsc, network, t, rngs, &order)
}

/// Agents, their memories and RNG streams, and the current state.
pub struct Organization<'a> {
    landscape: &'a Landscape,
    agents: Vec<AgentSpec>,
    memories: Vec<NormMemory>,
    rngs: Vec<ChaCha8Rng>,
    network: Box<dyn SocialNetwork>,
    state: OrgState,
    period: u32,
}

impl<'a> Organization<'a> {
    /// Agent `p` draws candidates from `derive_seed(run_seed, TAG_AGENT_BASE + p)`.
    pub fn new(
        landscape: &'a Landscape,
        agents: Vec<AgentSpec>,
        memory_span: u32,
        network: Box<dyn SocialNetwork>,
        initial: OrgState,
        run_seed: u64,
    ) -> Result<Self, SimError> {
        let structure = landscape.structure();
        let expected = structure.agents();
        if agents.len() != expected || network.agents() != expected {
            return Err(SimError::AgentCount {
                expected,
                found: if agents.len() != expected {
                    agents.len()
                } else {
                    network.agents()
                },
            });
        }
        if expected < 2 {
            return Err(SimError::NoResidual(expected));
        }
        for spec in &agents {
            if spec.n_social > structure.tasks_per_agent() {
                return Err(SimError::TooManySocialTasks(
                    spec.n_social,
                    structure.tasks_per_agent(),
                ));
            }
        }
        let memories = (0..expected)
            .map(|_| NormMemory::new(memory_span))
            .collect::<Result<_, _>>()?;
        let rngs = (0..expected)
            .map(|p| ChaCha8Rng::seed_from_u64(derive_seed(run_seed, TAG_AGENT_BASE + p as u64)))
            .collect();
        Ok(Self {
            landscape,
            agents,
            memories,
            rngs,
            network,
            state: initial,
            period: 0,
        })
    }

    pub fn state(&self) -> OrgState {
        self.state
    }

    /// Last completed period; 0 before the first step.
    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn memories(&self) -> &[NormMemory] {
        &self.memories
    }

    pub fn step(&mut self) -> Result<OrgState, SimError> {
        let t = self.period + 1;
        self.state = step_organization(
            self.state,
            &self.agents,
            &mut self.memories,
            self.landscape,
            self.network.as_ref(),
            t,
            &mut self.rngs,
        )?;
        self.period = t;
        Ok(self.state)
    }
}
