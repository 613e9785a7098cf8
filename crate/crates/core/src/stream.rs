//! Reproducible random streams.
//!
//! Every Monte Carlo routine splits its samples into fixed-size chunks and
//! gives each chunk its own ChaCha8 generator. The 256-bit key of a chunk is
//! derived from `(master seed, job, unit)` by chaining SplitMix64:
//!
//! ```text
//! s0 = mix(master)
//! s1 = mix(s0 ^ job)
//! s2 = mix(s1 ^ unit)
//! key = mix(s2), mix(s2 + G), mix(s2 + 2G), mix(s2 + 3G)     (little endian)
//! ```
//!
//! where `mix` is the SplitMix64 finalizer and `G = 0x9E3779B97F4A7C15`.
//! Because the chunk layout depends only on the sample count, results are
//! identical for any number of worker threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of samples drawn from one derived stream.
pub const CHUNK_SAMPLES: u64 = 1024;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-job `job` of a run with master seed `master`.
pub fn job_seed(master: u64, job: u64) -> u64 {
    mix64(mix64(master) ^ job)
}

/// Generator for work unit `unit` of job `job` under `master`.
pub fn derive_stream(master: u64, job: u64, unit: u64) -> ChaCha8Rng {
    let s2 = mix64(job_seed(master, job) ^ unit);
    let mut key = [0u8; 32];
    for (i, word) in key.chunks_exact_mut(8).enumerate() {
        let v = mix64(s2.wrapping_add(GOLDEN.wrapping_mul(i as u64)));
        word.copy_from_slice(&v.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
