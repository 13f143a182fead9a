//! Deterministic RNG derivation for parallel work.
//!
//! Every parallel unit (chain, Monte Carlo shard, experiment job) draws from
//! its own ChaCha substream, keyed by a user seed plus a structural index.
//! Results are therefore byte-identical for a fixed seed regardless of
//! thread count or scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; full-period bijective mix.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent child seed for job `idx` under `seed`.
pub fn child_seed(seed: u64, idx: u64) -> u64 {
    mix(mix(seed) ^ mix(idx.wrapping_mul(0xa076_1d64_78bd_642f)))
}

/// RNG on substream `stream` of the generator keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
