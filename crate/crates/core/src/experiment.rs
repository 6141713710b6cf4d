//! Scenario grids, seeded repetitions and the distance-to-maximum summary.
//!
//! Seeds: a scenario's `base_seed` folds the global seed with its
//! coordinates ([`derive_seed_path`]). In paired mode only `(N, P, K, C, S)`
//! enter the fold, so every scenario of one complexity level sees the same
//! landscapes, initial states and candidate draws for a given run index.
//! Run `r` uses `derive_seed(base_seed, TAG_RUN_BASE + r)`; the landscape,
//! the initial state and each agent draw from tagged children of that seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::landscape::{InteractionStructure, Landscape, LandscapeError, OrgState, MAX_ENUMERABLE_TASKS};
use crate::orgsim::{AgentSpec, GoalWeights, Goals, IncentiveScheme, Organization, RingNetwork, SimError};
use crate::seed::{derive_seed, derive_seed_path, TAG_INITIAL_STATE, TAG_LANDSCAPE, TAG_RUN_BASE};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Landscape(#[from] LandscapeError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("grid dimension `{0}` is empty")]
    EmptyDimension(&'static str),
    #[error("invalid model parameter: {0}")]
    InvalidModel(String),
    #[error("cannot summarize an empty set of runs")]
    NoRuns,
    #[error("run series have unequal lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("scenario {scenario} run {run}: {source}")]
    RunFailed {
        scenario: usize,
        run: usize,
        #[source]
        source: Box<ExperimentError>,
    },
    #[error("worker pool: {0}")]
    WorkerPool(String),
}

/// Internal and external coupling `(K, C, S)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coupling {
    pub k: usize,
    pub c: usize,
    pub s: usize,
}

impl Coupling {
    pub const INTERNAL: Self = Self { k: 3, c: 0, s: 0 };
    pub const LOW: Self = Self { k: 1, c: 1, s: 1 };
    pub const MODERATE: Self = Self { k: 2, c: 2, s: 2 };
    pub const HIGH: Self = Self { k: 3, c: 4, s: 3 };

    pub const fn new(k: usize, c: usize, s: usize) -> Self {
        Self { k, c, s }
    }

    /// `internal`, `low`, `moderate`, `high`, or `k{K}c{C}s{S}`.
    pub fn label(&self) -> String {
        match *self {
            Self::INTERNAL => "internal".into(),
            Self::LOW => "low".into(),
            Self::MODERATE => "moderate".into(),
            Self::HIGH => "high".into(),
            Self { k, c, s } => format!("k{k}c{c}s{s}"),
        }
    }
}

/// Parameters shared by every scenario of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Tasks per agent `N`.
    pub tasks_per_agent: usize,
    /// Agents `P`.
    pub agents: usize,
    /// Social tasks per agent `N_s`.
    pub social_tasks: usize,
    /// Ring degree `D`.
    pub network_degree: usize,
    /// Observation period `T`.
    pub periods: u32,
    /// Memory span `T_L`.
    pub memory_span: u32,
    pub goals: Goals,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            tasks_per_agent: 4,
            agents: 4,
            social_tasks: 2,
            network_degree: 2,
            periods: 500,
            memory_span: 20,
            goals: Goals::default(),
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |msg: String| Err(ExperimentError::InvalidModel(msg));
        if self.tasks_per_agent == 0 {
            return bad("N >= 1".into());
        }
        if self.social_tasks > self.tasks_per_agent {
            return bad(format!(
                "N_s <= N (N_s={}, N={})",
                self.social_tasks, self.tasks_per_agent
            ));
        }
        if self.tasks_per_agent * self.agents > MAX_ENUMERABLE_TASKS {
            return bad(format!(
                "M = N * P <= {MAX_ENUMERABLE_TASKS} (M={})",
                self.tasks_per_agent * self.agents
            ));
        }
        if self.periods == 0 {
            return bad("T >= 1".into());
        }
        RingNetwork::new(self.agents, self.network_degree)?;
        crate::orgsim::NormMemory::new(self.memory_span)?;
        Ok(())
    }
}

/// Value lists of the scenario grid plus the shared model.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub couplings: Vec<Coupling>,
    pub weights: Vec<GoalWeights>,
    pub schemes: Vec<IncentiveScheme>,
    pub rhos: Vec<f64>,
    pub model: ModelParams,
    pub seed: u64,
    pub paired_landscapes: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        let w = |a, b| GoalWeights::new(a, b).expect("valid default weights");
        let sc = |a, b| IncentiveScheme::new(a, b).expect("valid default scheme");
        Self {
            couplings: vec![Coupling::INTERNAL, Coupling::LOW, Coupling::MODERATE, Coupling::HIGH],
            weights: vec![w(1.0, 0.0), w(0.7, 0.3), w(0.5, 0.5)],
            schemes: vec![sc(1.0, 0.0), sc(0.75, 0.25), sc(0.5, 0.5), sc(0.25, 0.75)],
            rhos: vec![0.3],
            model: ModelParams::default(),
            seed: 20_210_000,
            paired_landscapes: true,
        }
    }
}

/// One cell of the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Position in grid order.
    pub index: usize,
    pub coupling: Coupling,
    pub weights: GoalWeights,
    pub scheme: IncentiveScheme,
    pub rho: f64,
    pub model: ModelParams,
    pub base_seed: u64,
}

impl Scenario {
    pub fn structure(&self) -> Result<InteractionStructure, LandscapeError> {
        let Coupling { k, c, s } = self.coupling;
        InteractionStructure::new(self.model.tasks_per_agent, self.model.agents, k, c, s)
    }

    pub fn agents(&self) -> Vec<AgentSpec> {
        (0..self.model.agents)
            .map(|index| AgentSpec {
                index,
                scheme: self.scheme,
                weights: self.weights,
                goals: self.model.goals,
                n_social: self.model.social_tasks,
            })
            .collect()
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        derive_seed(self.base_seed, TAG_RUN_BASE + run as u64)
    }
}

fn scenario_seed(
    global: u64,
    model: &ModelParams,
    coupling: Coupling,
    rest: Option<(GoalWeights, IncentiveScheme, f64)>,
) -> u64 {
    let mut tags = vec![
        model.tasks_per_agent as u64,
        model.agents as u64,
        coupling.k as u64,
        coupling.c as u64,
        coupling.s as u64,
    ];
    if let Some((w, sc, rho)) = rest {
        tags.extend([
            w.incentive().to_bits(),
            w.social().to_bits(),
            sc.alpha().to_bits(),
            sc.beta().to_bits(),
            rho.to_bits(),
        ]);
    }
    derive_seed_path(global, &tags)
}

/// Full cross product, coupling-major, then weights, then schemes, then rho.
pub fn expand_grid(config: &GridConfig) -> Result<Vec<Scenario>, ExperimentError> {
    for (name, empty) in [
        ("couplings", config.couplings.is_empty()),
        ("weights", config.weights.is_empty()),
        ("schemes", config.schemes.is_empty()),
        ("rho", config.rhos.is_empty()),
    ] {
        if empty {
            return Err(ExperimentError::EmptyDimension(name));
        }
    }
    config.model.validate()?;
    for &rho in &config.rhos {
        if !(0.0..=1.0).contains(&rho) {
            return Err(LandscapeError::RhoOutOfRange(rho).into());
        }
    }

    let mut scenarios = Vec::new();
    for &coupling in &config.couplings {
        InteractionStructure::new(
            config.model.tasks_per_agent,
            config.model.agents,
            coupling.k,
            coupling.c,
            coupling.s,
        )?;
        for &weights in &config.weights {
            for &scheme in &config.schemes {
                for &rho in &config.rhos {
                    let rest = (!config.paired_landscapes).then_some((weights, scheme, rho));
                    scenarios.push(Scenario {
                        index: scenarios.len(),
                        coupling,
                        weights,
                        scheme,
                        rho,
                        model: config.model.clone(),
                        base_seed: scenario_seed(config.seed, &config.model, coupling, rest),
                    });
                }
            }
        }
    }
    Ok(scenarios)
}

/// Normalized performance series of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run: usize,
    pub seed: u64,
    pub landscape_digest: u64,
    /// `phi[t - 1]` is organizational performance after period `t` divided
    /// by the landscape's global maximum.
    pub phi: Vec<f64>,
}

impl RunResult {
    /// `sum_t (1 - phi[t])`.
    pub fn distance(&self) -> f64 {
        self.phi.iter().map(|v| 1.0 - v).sum()
    }
}

/// Simulates run `run` of `scn`, calling `observe(t, state)` after every
/// period.
pub fn simulate<F>(scn: &Scenario, run: usize, mut observe: F) -> Result<RunResult, ExperimentError>
where
    F: FnMut(u32, OrgState),
{
    let seed = scn.run_seed(run);
    let landscape = Landscape::sample(scn.structure()?, scn.rho, derive_seed(seed, TAG_LANDSCAPE))?;
    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, TAG_INITIAL_STATE));
    let initial = OrgState::random(landscape.structure().tasks(), &mut init_rng);
    let network = RingNetwork::new(scn.model.agents, scn.model.network_degree)?;
    let mut org = Organization::new(
        &landscape,
        scn.agents(),
        scn.model.memory_span,
        Box::new(network),
        initial,
        seed,
    )?;

    let max = landscape.global_max();
    let mut phi = Vec::with_capacity(scn.model.periods as usize);
    for t in 1..=scn.model.periods {
        let state = org.step()?;
        observe(t, state);
        phi.push(landscape.org_performance(state) / max);
    }
    Ok(RunResult {
        run,
        seed,
        landscape_digest: landscape.digest(),
        phi,
    })
}

pub fn run_once(scn: &Scenario, run: usize) -> Result<RunResult, ExperimentError> {
    simulate(scn, run, |_, _| {})
}

/// Like [`run_once`], also returning the state after every period.
pub fn run_trajectory(scn: &Scenario, run: usize) -> Result<(RunResult, Vec<OrgState>), ExperimentError> {
    let mut states = Vec::with_capacity(scn.model.periods as usize);
    let result = simulate(scn, run, |_, x| states.push(x))?;
    Ok((result, states))
}

/// Mean series and distance to maximum over a set of runs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSummary {
    pub runs: usize,
    /// Mean normalized performance per period.
    pub mean: Vec<f64>,
    /// Standard error of `mean` per period (0 for a single run).
    pub std_error: Vec<f64>,
    /// `sum_t (1 - mean[t])`.
    pub distance: f64,
    /// Standard error of `distance` across runs.
    pub distance_se: f64,
    /// Per-run distances in run order.
    pub run_distances: Vec<f64>,
}

fn mean_and_se(values: impl ExactSizeIterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt() / n.sqrt())
}

pub fn summarize(results: &[RunResult]) -> Result<ScenarioSummary, ExperimentError> {
    let first = results.first().ok_or(ExperimentError::NoRuns)?;
    let periods = first.phi.len();
    if let Some(bad) = results.iter().find(|r| r.phi.len() != periods) {
        return Err(ExperimentError::LengthMismatch(periods, bad.phi.len()));
    }
    let (mean, std_error): (Vec<f64>, Vec<f64>) = (0..periods)
        .map(|t| mean_and_se(results.iter().map(|r| r.phi[t])))
        .unzip();
    let distance = mean.iter().map(|v| 1.0 - v).sum();
    let run_distances: Vec<f64> = results.iter().map(RunResult::distance).collect();
    let (_, distance_se) = mean_and_se(run_distances.iter().copied());
    Ok(ScenarioSummary {
        runs: results.len(),
        mean,
        std_error,
        distance,
        distance_se,
        run_distances,
    })
}

/// Difference `b - a` of two summaries' distances and its standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceGap {
    pub diff: f64,
    /// From per-run differences; valid when both used paired seeds.
    pub se_paired: f64,
    /// `sqrt(se_a^2 + se_b^2)`.
    pub se_unpaired: f64,
}

pub fn distance_gap(a: &ScenarioSummary, b: &ScenarioSummary) -> DistanceGap {
    let se_unpaired = (a.distance_se.powi(2) + b.distance_se.powi(2)).sqrt();
    let se_paired = if a.runs == b.runs {
        let diffs: Vec<f64> = a
            .run_distances
            .iter()
            .zip(&b.run_distances)
            .map(|(x, y)| y - x)
            .collect();
        mean_and_se(diffs.iter().copied()).1
    } else {
        f64::NAN
    };
    DistanceGap {
        diff: b.distance - a.distance,
        se_paired,
        se_unpaired,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunnerOptions {
    /// Repetitions `R` per scenario.
    pub runs: usize,
    /// Worker threads.
    pub workers: usize,
    /// Keep every run's series in the reports.
    pub keep_runs: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub scenario: Scenario,
    pub summary: ScenarioSummary,
    pub runs: Option<Vec<RunResult>>,
}

/// Runs `opts.runs` repetitions of every scenario on a pool of
/// `opts.workers` threads. Output does not depend on the worker count.
pub fn run_grid(scenarios: &[Scenario], opts: &RunnerOptions) -> Result<Vec<ScenarioReport>, ExperimentError> {
    if opts.workers == 0 {
        return Err(ExperimentError::WorkerPool("worker budget must be at least 1".into()));
    }
    if scenarios.is_empty() {
        return Ok(Vec::new());
    }
    if opts.runs == 0 {
        return Err(ExperimentError::NoRuns);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| ExperimentError::WorkerPool(e.to_string()))?;

    let jobs: Vec<(usize, usize)> = (0..scenarios.len())
        .flat_map(|s| (0..opts.runs).map(move |r| (s, r)))
        .collect();
    let mut results = pool.install(|| {
        jobs.par_iter()
            .map(|&(s, r)| {
                run_once(&scenarios[s], r).map_err(|e| ExperimentError::RunFailed {
                    scenario: scenarios[s].index,
                    run: r,
                    source: Box::new(e),
                })
            })
            .collect::<Vec<_>>()
    })
    .into_iter();

    let mut reports = Vec::with_capacity(scenarios.len());
    for scenario in scenarios {
        let runs = results
            .by_ref()
            .take(opts.runs)
            .collect::<Result<Vec<_>, _>>()?;
        let summary = summarize(&runs)?;
        reports.push(ScenarioReport {
            scenario: scenario.clone(),
            summary,
            runs: opts.keep_runs.then_some(runs),
        });
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_run(value: f64, periods: usize, run: usize) -> RunResult {
        RunResult {
            run,
            seed: run as u64,
            landscape_digest: 0,
            phi: vec![value; periods],
        }
    }

    fn small_config() -> GridConfig {
        GridConfig {
            model: ModelParams {
                periods: 60,
                ..ModelParams::default()
            },
            ..GridConfig::default()
        }
    }

    #[test]
    fn default_grid_has_48_scenarios() {
        let grid = expand_grid(&GridConfig::default()).unwrap();
        assert_eq!(grid.len(), 48);
        assert!(grid.iter().enumerate().all(|(i, s)| s.index == i));
        assert_eq!(grid[0].coupling, Coupling::INTERNAL);
        assert_eq!(grid[47].coupling, Coupling::HIGH);
    }

    #[test]
    fn single_cell_grid() {
        let cfg = GridConfig {
            couplings: vec![Coupling::LOW],
            weights: vec![GoalWeights::incentive_only()],
            schemes: vec![IncentiveScheme::individual()],
            ..GridConfig::default()
        };
        assert_eq!(expand_grid(&cfg).unwrap().len(), 1);
    }

    #[test]
    fn two_by_two_by_two_order() {
        let cfg = GridConfig {
            couplings: vec![Coupling::LOW, Coupling::HIGH],
            weights: vec![GoalWeights::new(1.0, 0.0).unwrap(), GoalWeights::new(0.5, 0.5).unwrap()],
            schemes: vec![IncentiveScheme::new(1.0, 0.0).unwrap(), IncentiveScheme::new(0.25, 0.75).unwrap()],
            ..GridConfig::default()
        };
        let grid = expand_grid(&cfg).unwrap();
        let coords: Vec<(usize, f64, f64)> = grid
            .iter()
            .map(|s| (s.coupling.k, s.weights.social(), s.scheme.alpha()))
            .collect();
        assert_eq!(
            coords,
            vec![
                (1, 0.0, 1.0),
                (1, 0.0, 0.25),
                (1, 0.5, 1.0),
                (1, 0.5, 0.25),
                (3, 0.0, 1.0),
                (3, 0.0, 0.25),
                (3, 0.5, 1.0),
                (3, 0.5, 0.25),
            ]
        );
    }

    #[test]
    fn empty_dimension_is_rejected() {
        let cfg = GridConfig {
            schemes: vec![],
            ..GridConfig::default()
        };
        assert!(matches!(expand_grid(&cfg), Err(ExperimentError::EmptyDimension("schemes"))));
    }

    #[test]
    fn invalid_coupling_is_rejected() {
        let cfg = GridConfig {
            couplings: vec![Coupling::new(4, 0, 0)],
            ..GridConfig::default()
        };
        let err = expand_grid(&cfg).unwrap_err();
        assert!(err.to_string().contains("K < N"), "{err}");
    }

    #[test]
    fn paired_seeds_follow_complexity_only() {
        let paired = expand_grid(&GridConfig::default()).unwrap();
        for s in &paired {
            let twin = paired.iter().find(|o| o.coupling == s.coupling).unwrap();
            assert_eq!(s.base_seed, twin.base_seed);
        }
        assert_ne!(paired[0].base_seed, paired[47].base_seed);

        let independent = expand_grid(&GridConfig {
            paired_landscapes: false,
            ..GridConfig::default()
        })
        .unwrap();
        let mut seeds: Vec<u64> = independent.iter().map(|s| s.base_seed).collect();
        seeds.sort_unstable();
        seeds.dedup();
        assert_eq!(seeds.len(), 48);
    }

    #[test]
    fn run_is_deterministic_and_normalized() {
        let grid = expand_grid(&small_config()).unwrap();
        let scn = &grid[17];
        let a = run_once(scn, 3).unwrap();
        let b = run_once(scn, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.phi.len(), 60);
        assert!(a.phi.iter().all(|&v| v > 0.0 && v <= 1.0));
        let c = run_once(scn, 4).unwrap();
        assert_ne!(a.seed, c.seed);
        assert_ne!(a.landscape_digest, c.landscape_digest);
    }

    #[test]
    fn summary_of_one_run_is_that_run() {
        let run = RunResult {
            run: 0,
            seed: 0,
            landscape_digest: 0,
            phi: vec![0.5, 0.75, 1.0],
        };
        let s = summarize(std::slice::from_ref(&run)).unwrap();
        assert_eq!(s.mean, run.phi);
        assert_eq!(s.std_error, vec![0.0; 3]);
        assert_eq!(s.distance, 0.75);
    }

    #[test]
    fn summary_distance_arithmetic() {
        let runs = [constant_run(0.8, 500, 0), constant_run(0.6, 500, 1)];
        let s = summarize(&runs).unwrap();
        assert!((s.distance - 150.0).abs() < 1e-9, "{}", s.distance);
        let perfect = summarize(&[constant_run(1.0, 500, 0)]).unwrap();
        assert_eq!(perfect.distance, 0.0);
    }

    #[test]
    fn summary_errors() {
        assert!(matches!(summarize(&[]), Err(ExperimentError::NoRuns)));
        let runs = [constant_run(0.5, 3, 0), constant_run(0.5, 4, 1)];
        assert!(matches!(summarize(&runs), Err(ExperimentError::LengthMismatch(3, 4))));
    }

    #[test]
    fn gap_of_identical_runs_is_zero() {
        let runs = [constant_run(0.8, 10, 0), constant_run(0.6, 10, 1)];
        let s = summarize(&runs).unwrap();
        let gap = distance_gap(&s, &s);
        assert_eq!(gap.diff, 0.0);
        assert_eq!(gap.se_paired, 0.0);
    }

    #[test]
    fn grid_runner_edge_cases() {
        let opts = RunnerOptions {
            runs: 2,
            workers: 2,
            keep_runs: true,
        };
        assert!(run_grid(&[], &opts).unwrap().is_empty());
        let zero = RunnerOptions { workers: 0, ..opts };
        let grid = expand_grid(&small_config()).unwrap();
        assert!(matches!(run_grid(&grid[..1], &zero), Err(ExperimentError::WorkerPool(_))));

        let reports = run_grid(&grid[..2], &opts).unwrap();
        assert_eq!(reports.len(), 2);
        let runs = reports[1].runs.as_ref().unwrap();
        assert_eq!(runs.len(), 2);
        assert_eq!(runs[1], run_once(&grid[1], 1).unwrap());
    }

    #[test]
    fn failed_run_names_scenario_and_run() {
        let mut grid = expand_grid(&small_config()).unwrap();
        grid.truncate(1);
        grid[0].rho = 2.0;
        let opts = RunnerOptions {
            runs: 1,
            workers: 1,
            keep_runs: false,
        };
        let err = run_grid(&grid, &opts).unwrap_err();
        assert!(matches!(err, ExperimentError::RunFailed { scenario: 0, run: 0, .. }), "{err}");
    }
}
