//! Derivation of per-tick random streams from a scenario seed.
//!
//! Every stochastic component draws from its own `(seed, stream, tick)`
//! stream, so traces are reproducible and two runs that share a seed see
//! identical noise regardless of which policy is active.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const STREAM_DETECT: u64 = 1;
pub(crate) const STREAM_SNR_JITTER: u64 = 2;

/// splitmix64 finalizer; decorrelates consecutive (seed, stream, tick) keys.
fn mix(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub(crate) fn derive(seed: u64, stream: u64, tick: u64) -> ChaCha8Rng {
    let key = mix(seed ^ mix(stream.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ mix(tick)));
    ChaCha8Rng::seed_from_u64(key)
}
