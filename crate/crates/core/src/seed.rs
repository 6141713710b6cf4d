//! Seed derivation.
//!
//! Every random stream in a run is derived from a parent seed and a tag with
//! [`derive_seed`], a SplitMix64-based mixer. Streams never depend on
//! iteration order or worker count.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Tag of the contribution-table stream of a run.
pub const TAG_LANDSCAPE: u64 = 0x6c61_6e64;
/// Tag of the initial-state stream of a run.
pub const TAG_INITIAL_STATE: u64 = 0x696e_6974;
/// Agent `p` draws from `derive_seed(run_seed, TAG_AGENT_BASE + p)`.
pub const TAG_AGENT_BASE: u64 = 0x6167_0000;
/// Per-run seeds are `derive_seed(base_seed, TAG_RUN_BASE + r)`.
pub const TAG_RUN_BASE: u64 = 0x7275_0000_0000;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive_seed(parent: u64, tag: u64) -> u64 {
    splitmix64(parent ^ splitmix64(tag))
}

/// Folds a sequence of tags into `parent`, in order.
pub fn derive_seed_path(parent: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(parent, |acc, &t| derive_seed(acc, t))
}
