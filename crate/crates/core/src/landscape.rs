//! Task environment: interaction structures, correlated contribution tables
//! and performance evaluation.
//!
//! Tasks are 0-indexed. Agent `p` owns tasks `N*p .. N*p + N` and task `i`
//! is bit `i` of an [`OrgState`].
//!
//! The contribution of task `i` is read from a dense table indexed by the
//! *configuration index*: bit 0 holds `x_i` and bit `j + 1` holds the bit of
//! the `j`-th entry of `deps(i)`. Dependencies are listed internal ones
//! first, then external ones grouped by partner agent.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::{self, Read, Write};
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::seed::derive_seed;

/// Largest `M` for which [`compute_global_max`] enumerates `2^M` states.
pub const MAX_ENUMERABLE_TASKS: usize = 24;

/// Largest `M` an [`OrgState`] can hold.
pub const MAX_STATE_BITS: usize = 64;

const DUMP_MAGIC: &[u8; 8] = b"NKLSCAPE";
const DUMP_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LandscapeError {
    #[error("invalid parameter {name}={value}: requires {bound}")]
    InvalidParameter {
        name: &'static str,
        value: usize,
        bound: String,
    },
    #[error("correlation rho={0} outside [0, 1]")]
    RhoOutOfRange(f64),
    #[error("M={tasks} tasks exceeds the enumeration guard of {max}")]
    TooManyTasks { tasks: usize, max: usize },
    #[error("table {task} has {found} entries, expected {expected}")]
    TableShape {
        task: usize,
        found: usize,
        expected: usize,
    },
    #[error("table {task} entry {index} = {value} outside [0, 1]")]
    TableValue { task: usize, index: usize, value: f64 },
    #[error("malformed landscape dump: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Dependency pattern of every task on other tasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionStructure {
    n: usize,
    p: usize,
    k: usize,
    c: usize,
    s: usize,
    deps: Vec<Vec<usize>>,
}

impl InteractionStructure {
    /// Builds the cyclic pattern for `N` tasks per agent and `P` agents.
    ///
    /// Task `n` of agent `p` depends on the next `K` tasks of its own block
    /// (cyclically), and on the tasks at block positions `n, n+1, .., n+C-1`
    /// (cyclically) of agents `p+1, .., p+S` (cyclically over agents).
    pub fn new(n: usize, p: usize, k: usize, c: usize, s: usize) -> Result<Self, LandscapeError> {
        if n == 0 {
            return Err(invalid("N", n, "N >= 1"));
        }
        if p == 0 {
            return Err(invalid("P", p, "P >= 1"));
        }
        if k >= n {
            return Err(invalid("K", k, format!("0 <= K < N (N={n})")));
        }
        if c > n {
            return Err(invalid("C", c, format!("0 <= C <= N (N={n})")));
        }
        if s >= p {
            return Err(invalid("S", s, format!("0 <= S < P (P={p})")));
        }
        let tasks = n * p;
        if tasks > MAX_STATE_BITS {
            return Err(LandscapeError::TooManyTasks {
                tasks,
                max: MAX_STATE_BITS,
            });
        }

        let mut deps = Vec::with_capacity(tasks);
        for agent in 0..p {
            for pos in 0..n {
                let mut list = Vec::with_capacity(k + c * s);
                list.extend((1..=k).map(|d| agent * n + (pos + d) % n));
                for offset in 1..=s {
                    let partner = (agent + offset) % p;
                    list.extend((0..c).map(|d| partner * n + (pos + d) % n));
                }
                deps.push(list);
            }
        }
        Ok(Self { n, p, k, c, s, deps })
    }

    pub fn tasks_per_agent(&self) -> usize {
        self.n
    }

    pub fn agents(&self) -> usize {
        self.p
    }

    /// `(K, C, S)`.
    pub fn couplings(&self) -> (usize, usize, usize) {
        (self.k, self.c, self.s)
    }

    /// Total number of tasks `M = N * P`.
    pub fn tasks(&self) -> usize {
        self.n * self.p
    }

    pub fn deps(&self, task: usize) -> &[usize] {
        &self.deps[task]
    }

    /// `K + C * S`.
    pub fn degree(&self) -> usize {
        self.k + self.c * self.s
    }

    /// Number of entries of each contribution table, `2^(1 + K + C*S)`.
    pub fn table_len(&self) -> usize {
        1usize << (1 + self.degree())
    }

    pub fn block(&self, agent: usize) -> Range<usize> {
        agent * self.n..(agent + 1) * self.n
    }

    pub fn agent_of(&self, task: usize) -> usize {
        task / self.n
    }

    /// Packs `(x_i, deps(i))` of `state` into a table index.
    #[inline]
    pub fn config_index(&self, task: usize, state: OrgState) -> usize {
        let bits = state.bits();
        let mut index = ((bits >> task) & 1) as usize;
        for (j, &dep) in self.deps[task].iter().enumerate() {
            index |= (((bits >> dep) & 1) as usize) << (j + 1);
        }
        index
    }
}

fn invalid(name: &'static str, value: usize, bound: impl Into<String>) -> LandscapeError {
    LandscapeError::InvalidParameter {
        name,
        value,
        bound: bound.into(),
    }
}

/// The organization's `M`-bit joint decision vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrgState {
    bits: u64,
    len: usize,
}

impl OrgState {
    /// All-zero state of `len` bits.
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_STATE_BITS, "state length {len} exceeds {MAX_STATE_BITS}");
        Self { bits: 0, len }
    }

    /// Bits above `len` are discarded.
    pub fn from_bits(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_STATE_BITS, "state length {len} exceeds {MAX_STATE_BITS}");
        Self {
            bits: bits & low_mask(len),
            len,
        }
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self::from_bits(rng.random::<u64>(), len)
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn len(self) -> usize {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn bit(self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.bits >> i) & 1 == 1
    }

    pub fn flipped(self, i: usize) -> Self {
        debug_assert!(i < self.len);
        Self {
            bits: self.bits ^ (1 << i),
            len: self.len,
        }
    }

    /// Agent `agent`'s block of width `width`, as the low bits of the result.
    pub fn block(self, agent: usize, width: usize) -> u64 {
        (self.bits >> (agent * width)) & low_mask(width)
    }

    /// Copy of `self` with agent `agent`'s block replaced.
    pub fn with_block(self, agent: usize, width: usize, block: u64) -> Self {
        let shift = agent * width;
        let mask = low_mask(width) << shift;
        Self {
            bits: (self.bits & !mask) | ((block << shift) & mask),
            len: self.len,
        }
    }
}

pub(crate) fn low_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Standard normal CDF.
fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Gaussian correlation whose uniform (copula) margins have Pearson
/// correlation `rho`.
pub fn gaussian_correlation(rho: f64) -> f64 {
    if rho >= 1.0 {
        1.0
    } else {
        2.0 * (PI * rho / 6.0).sin()
    }
}

/// Contribution tables over an [`InteractionStructure`] with the cached
/// global maximum of organizational performance.
#[derive(Debug, Clone, PartialEq)]
pub struct Landscape {
    structure: InteractionStructure,
    rho: f64,
    seed: u64,
    tables: Vec<Vec<f64>>,
    global_max: f64,
    argmax: OrgState,
}

impl Landscape {
    /// Samples tables with cross-agent correlation `rho`.
    ///
    /// For every block position `n` and configuration index, one
    /// equicorrelated Gaussian vector of length `P` is drawn and mapped
    /// through the normal CDF; coordinate `p` becomes the entry of agent
    /// `p`'s task `n`. Position `n` draws from its own substream of `seed`.
    pub fn sample(structure: InteractionStructure, rho: f64, seed: u64) -> Result<Self, LandscapeError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(LandscapeError::RhoOutOfRange(rho));
        }
        check_enumerable(&structure)?;

        let (n, p) = (structure.n, structure.p);
        let len = structure.table_len();
        let corr = gaussian_correlation(rho);
        let common = corr.sqrt();
        let idio = (1.0 - corr).max(0.0).sqrt();

        let mut tables = vec![vec![0.0; len]; structure.tasks()];
        for pos in 0..n {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, pos as u64));
            // Draw order is config-major, then agent.
            #[allow(clippy::needless_range_loop)]
            for config in 0..len {
                let shared: f64 = rng.sample(StandardNormal);
                for agent in 0..p {
                    let own: f64 = rng.sample(StandardNormal);
                    tables[agent * n + pos][config] = normal_cdf(common * shared + idio * own);
                }
            }
        }
        Self::assemble(structure, rho, seed, tables)
    }

    /// Wraps explicit tables; validates shape and range and enumerates the
    /// global maximum.
    pub fn from_tables(
        structure: InteractionStructure,
        rho: f64,
        seed: u64,
        tables: Vec<Vec<f64>>,
    ) -> Result<Self, LandscapeError> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(LandscapeError::RhoOutOfRange(rho));
        }
        check_enumerable(&structure)?;
        let expected = structure.table_len();
        if tables.len() != structure.tasks() {
            return Err(LandscapeError::Format(format!(
                "{} tables for {} tasks",
                tables.len(),
                structure.tasks()
            )));
        }
        for (task, table) in tables.iter().enumerate() {
            if table.len() != expected {
                return Err(LandscapeError::TableShape {
                    task,
                    found: table.len(),
                    expected,
                });
            }
            if let Some((index, &value)) = table
                .iter()
                .enumerate()
                .find(|(_, v)| !(0.0..=1.0).contains(*v))
            {
                return Err(LandscapeError::TableValue { task, index, value });
            }
        }
        Self::assemble(structure, rho, seed, tables)
    }

    fn assemble(
        structure: InteractionStructure,
        rho: f64,
        seed: u64,
        tables: Vec<Vec<f64>>,
    ) -> Result<Self, LandscapeError> {
        let mut landscape = Self {
            argmax: OrgState::zeros(structure.tasks()),
            structure,
            rho,
            seed,
            tables,
            global_max: 0.0,
        };
        let (max, argmax) = compute_global_max(&landscape)?;
        landscape.global_max = max;
        landscape.argmax = argmax;
        Ok(landscape)
    }

    pub fn structure(&self) -> &InteractionStructure {
        &self.structure
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn table(&self, task: usize) -> &[f64] {
        &self.tables[task]
    }

    pub fn global_max(&self) -> f64 {
        self.global_max
    }

    pub fn argmax_state(&self) -> OrgState {
        self.argmax
    }

    /// Contribution `phi(x_i)` of task `task` under `state`.
    #[inline]
    pub fn contribution(&self, task: usize, state: OrgState) -> f64 {
        self.tables[task][self.structure.config_index(task, state)]
    }

    /// Mean contribution over agent `agent`'s block.
    pub fn agent_performance(&self, agent: usize, state: OrgState) -> f64 {
        let sum: f64 = self
            .structure
            .block(agent)
            .map(|i| self.contribution(i, state))
            .sum();
        sum / self.structure.n as f64
    }

    /// Own performance of every agent, in agent order.
    pub fn agent_performances(&self, state: OrgState) -> Vec<f64> {
        (0..self.structure.p)
            .map(|agent| self.agent_performance(agent, state))
            .collect()
    }

    /// Mean of the agents' own performances.
    pub fn org_performance(&self, state: OrgState) -> f64 {
        let sum: f64 = (0..self.structure.p)
            .map(|agent| self.agent_performance(agent, state))
            .sum();
        sum / self.structure.p as f64
    }

    /// FNV-1a over the structure parameters and table bits.
    pub fn digest(&self) -> u64 {
        const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut hash = OFFSET;
        let mut feed = |word: u64| {
            for byte in word.to_le_bytes() {
                hash ^= byte as u64;
                hash = hash.wrapping_mul(PRIME);
            }
        };
        let s = &self.structure;
        for v in [s.n, s.p, s.k, s.c, s.s] {
            feed(v as u64);
        }
        feed(self.rho.to_bits());
        for table in &self.tables {
            for v in table {
                feed(v.to_bits());
            }
        }
        hash
    }

    /// Writes the self-describing little-endian binary dump.
    ///
    /// Layout: magic `NKLSCAPE`, `u32` version, `u32` N, P, K, C, S,
    /// `f64` rho, `u64` seed, `u32` table length, all tables in task order
    /// as `f64`, `f64` global max, `u64` argmax bits.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<(), LandscapeError> {
        let s = &self.structure;
        out.write_all(DUMP_MAGIC)?;
        out.write_all(&DUMP_VERSION.to_le_bytes())?;
        for v in [s.n, s.p, s.k, s.c, s.s] {
            out.write_all(&(v as u32).to_le_bytes())?;
        }
        out.write_all(&self.rho.to_le_bytes())?;
        out.write_all(&self.seed.to_le_bytes())?;
        out.write_all(&(s.table_len() as u32).to_le_bytes())?;
        let mut buf = Vec::with_capacity(s.table_len() * 8);
        for table in &self.tables {
            buf.clear();
            for v in table {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            out.write_all(&buf)?;
        }
        out.write_all(&self.global_max.to_le_bytes())?;
        out.write_all(&self.argmax.bits().to_le_bytes())?;
        Ok(())
    }

    /// Reads a dump written by [`Landscape::write_to`]. The stored global
    /// maximum must agree with re-enumeration.
    pub fn read_from<R: Read>(mut input: R) -> Result<Self, LandscapeError> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(LandscapeError::Format("bad magic".into()));
        }
        let version = read_u32(&mut input)?;
        if version != DUMP_VERSION {
            return Err(LandscapeError::Format(format!("unsupported version {version}")));
        }
        let mut params = [0usize; 5];
        for v in params.iter_mut() {
            *v = read_u32(&mut input)? as usize;
        }
        let [n, p, k, c, s] = params;
        let structure = InteractionStructure::new(n, p, k, c, s)?;
        let rho = f64::from_bits(read_u64(&mut input)?);
        let seed = read_u64(&mut input)?;
        let len = read_u32(&mut input)? as usize;
        if len != structure.table_len() {
            return Err(LandscapeError::Format(format!(
                "table length {len} does not match structure ({})",
                structure.table_len()
            )));
        }
        let mut tables = Vec::with_capacity(structure.tasks());
        let mut buf = vec![0u8; len * 8];
        for _ in 0..structure.tasks() {
            input.read_exact(&mut buf)?;
            tables.push(
                buf.chunks_exact(8)
                    .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                    .collect(),
            );
        }
        let stored_max = f64::from_bits(read_u64(&mut input)?);
        let stored_argmax = read_u64(&mut input)?;
        let landscape = Self::from_tables(structure, rho, seed, tables)?;
        if landscape.global_max.to_bits() != stored_max.to_bits()
            || landscape.argmax.bits() != stored_argmax
        {
            return Err(LandscapeError::Format(
                "stored global maximum disagrees with the tables".into(),
            ));
        }
        Ok(landscape)
    }
}

fn read_u32<R: Read>(input: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(input: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn check_enumerable(structure: &InteractionStructure) -> Result<(), LandscapeError> {
    if structure.tasks() > MAX_ENUMERABLE_TASKS {
        return Err(LandscapeError::TooManyTasks {
            tasks: structure.tasks(),
            max: MAX_ENUMERABLE_TASKS,
        });
    }
    Ok(())
}

/// Exact maximum of organizational performance over all `2^M` states.
///
/// Ties resolve to the state with the smallest integer encoding, so the
/// result does not depend on how the enumeration is split across threads.
pub fn compute_global_max(landscape: &Landscape) -> Result<(f64, OrgState), LandscapeError> {
    let structure = landscape.structure();
    check_enumerable(structure)?;
    let m = structure.tasks();
    let better = |a: (f64, u64), b: (f64, u64)| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    let (max, bits) = (0..1u32 << m)
        .into_par_iter()
        .with_min_len(1 << 10)
        .map(|bits| {
            let bits = u64::from(bits);
            (landscape.org_performance(OrgState::from_bits(bits, m)), bits)
        })
        .reduce(|| (f64::NEG_INFINITY, u64::MAX), better);
    Ok((max, OrgState::from_bits(bits, m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_landscape(structure: InteractionStructure, value: f64) -> Landscape {
        let tables = vec![vec![value; structure.table_len()]; structure.tasks()];
        Landscape::from_tables(structure, 0.0, 0, tables).unwrap()
    }

    #[test]
    fn internal_pattern_covers_own_block() {
        let s = InteractionStructure::new(4, 4, 3, 0, 0).unwrap();
        for i in 0..16 {
            let mut deps = s.deps(i).to_vec();
            deps.sort_unstable();
            let expected: Vec<usize> = s.block(s.agent_of(i)).filter(|&j| j != i).collect();
            assert_eq!(deps, expected);
        }
    }

    #[test]
    fn no_couplings_means_no_deps() {
        let s = InteractionStructure::new(4, 4, 0, 0, 0).unwrap();
        assert!((0..16).all(|i| s.deps(i).is_empty()));
        assert_eq!(s.table_len(), 2);
    }

    #[test]
    fn high_complexity_depends_on_everything() {
        let s = InteractionStructure::new(4, 4, 3, 4, 3).unwrap();
        for i in 0..16 {
            assert_eq!(s.deps(i).len(), 15);
            let mut deps = s.deps(i).to_vec();
            deps.sort_unstable();
            let expected: Vec<usize> = (0..16).filter(|&j| j != i).collect();
            assert_eq!(deps, expected);
        }
    }

    #[test]
    fn low_complexity_pattern() {
        // Task 0 (agent 0, position 0): internal neighbour 1, external task 0
        // of agent 1 (global index 4).
        let s = InteractionStructure::new(4, 4, 1, 1, 1).unwrap();
        assert_eq!(s.deps(0), &[1, 4]);
        assert_eq!(s.deps(3), &[0, 7]);
        assert_eq!(s.deps(15), &[12, 3]);
    }

    #[test]
    fn rejects_out_of_bounds_parameters() {
        let err = InteractionStructure::new(4, 4, 4, 0, 0).unwrap_err();
        assert!(err.to_string().contains("K < N"), "{err}");
        let err = InteractionStructure::new(4, 4, 1, 5, 1).unwrap_err();
        assert!(err.to_string().contains("C <= N"), "{err}");
        let err = InteractionStructure::new(4, 4, 1, 1, 4).unwrap_err();
        assert!(err.to_string().contains("S < P"), "{err}");
    }

    #[test]
    fn rejects_rho_outside_unit_interval() {
        let s = InteractionStructure::new(2, 2, 0, 0, 0).unwrap();
        assert!(matches!(
            Landscape::sample(s.clone(), 1.5, 0),
            Err(LandscapeError::RhoOutOfRange(_))
        ));
        assert!(Landscape::sample(s, -0.1, 0).is_err());
    }

    #[test]
    fn enumeration_guard() {
        let s = InteractionStructure::new(5, 5, 0, 0, 0).unwrap();
        let err = Landscape::sample(s, 0.0, 0).unwrap_err();
        assert!(matches!(err, LandscapeError::TooManyTasks { tasks: 25, .. }));
    }

    #[test]
    fn constant_tables() {
        let s = InteractionStructure::new(4, 4, 2, 2, 2).unwrap();
        let lsc = constant_landscape(s, 0.7);
        assert_eq!(lsc.global_max(), 0.7);
        assert_eq!(lsc.argmax_state().bits(), 0);
        let x = OrgState::from_bits(0xbeef, 16);
        assert_eq!(lsc.agent_performance(2, x), 0.7);
        assert_eq!(lsc.org_performance(x), 0.7);
    }

    #[test]
    fn single_task_agent_performance_is_its_contribution() {
        let s = InteractionStructure::new(1, 3, 0, 1, 2).unwrap();
        let lsc = Landscape::sample(s, 0.3, 5).unwrap();
        let x = OrgState::from_bits(0b101, 3);
        for p in 0..3 {
            assert_eq!(lsc.agent_performance(p, x), lsc.contribution(p, x));
        }
    }

    #[test]
    fn contribution_ignores_non_dependencies() {
        let s = InteractionStructure::new(4, 4, 0, 0, 0).unwrap();
        let lsc = Landscape::sample(s, 0.3, 9).unwrap();
        let x = OrgState::from_bits(0x1234, 16);
        for i in 0..16 {
            for j in (0..16).filter(|&j| j != i) {
                assert_eq!(lsc.contribution(i, x), lsc.contribution(i, x.flipped(j)));
            }
        }
    }

    #[test]
    fn contribution_reacts_to_dependencies() {
        let s = InteractionStructure::new(4, 4, 2, 2, 2).unwrap();
        let lsc = Landscape::sample(s, 0.3, 3).unwrap();
        let x = OrgState::from_bits(0x9a5c, 16);
        for i in 0..16 {
            for &j in lsc.structure().deps(i) {
                assert_ne!(lsc.contribution(i, x), lsc.contribution(i, x.flipped(j)));
            }
        }
    }

    #[test]
    fn two_by_two_agent_performance_by_hand() {
        let s = InteractionStructure::new(2, 2, 1, 1, 1).unwrap();
        let lsc = Landscape::sample(s, 0.3, 17).unwrap();
        // x = bits 0..4 = 1,0,1,1 (task 0 is the least significant bit).
        let x = OrgState::from_bits(0b1101, 4);
        // Task 1 of agent 0: x1 = 0, deps [0 (internal), 3 (agent 1, pos 1)].
        // index = x1 | x0 << 1 | x3 << 2 = 0 | 2 | 4.
        assert_eq!(lsc.structure().deps(1), &[0, 3]);
        // Task 0: x0 = 1, deps [1, 2] -> 1 | 0 | 4.
        let expected = (lsc.table(0)[5] + lsc.table(1)[6]) / 2.0;
        assert_eq!(lsc.agent_performance(0, x), expected);
    }

    #[test]
    fn block_accessors() {
        let x = OrgState::from_bits(0xabcd, 16);
        assert_eq!(x.block(0, 4), 0xd);
        assert_eq!(x.block(3, 4), 0xa);
        let y = x.with_block(1, 4, 0x3);
        assert_eq!(y.bits(), 0xab3d);
        assert_eq!(OrgState::from_bits(u64::MAX, 5).bits(), 0b11111);
    }

    #[test]
    fn rho_one_gives_identical_tables() {
        let s = InteractionStructure::new(4, 4, 1, 1, 1).unwrap();
        let lsc = Landscape::sample(s, 1.0, 11).unwrap();
        for pos in 0..4 {
            for agent in 1..4 {
                assert_eq!(lsc.table(pos), lsc.table(agent * 4 + pos));
            }
        }
    }

    #[test]
    fn dump_round_trip_is_bit_exact() {
        let s = InteractionStructure::new(3, 3, 1, 2, 1).unwrap();
        let lsc = Landscape::sample(s, 0.45, 77).unwrap();
        let mut buf = Vec::new();
        lsc.write_to(&mut buf).unwrap();
        let back = Landscape::read_from(buf.as_slice()).unwrap();
        assert_eq!(back.digest(), lsc.digest());
        assert_eq!(back.global_max().to_bits(), lsc.global_max().to_bits());
        assert_eq!(back, lsc);

        buf[0] = b'X';
        assert!(matches!(Landscape::read_from(buf.as_slice()), Err(LandscapeError::Format(_))));
    }

    #[test]
    fn truncated_dump_is_an_io_error() {
        let s = InteractionStructure::new(2, 2, 0, 0, 0).unwrap();
        let lsc = Landscape::sample(s, 0.0, 1).unwrap();
        let mut buf = Vec::new();
        lsc.write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(Landscape::read_from(buf.as_slice()), Err(LandscapeError::Io(_))));
    }
}
