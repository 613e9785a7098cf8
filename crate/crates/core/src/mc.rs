//! Chunked parallel sampling with thread-count independent results.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stream::{derive_stream, CHUNK_SAMPLES};

pub(crate) fn check_samples(samples: u64, min: u64) -> Result<()> {
    if samples < min {
        Err(Error::InvalidSampleCount { got: samples, min })
    } else {
        Ok(())
    }
}

/// Runs `work(rng, len)` over consecutive chunks of `samples` draws and
/// returns the per-chunk results in chunk order.
///
/// Chunk `i` always covers the same draws and uses the stream
/// `derive_stream(seed, job, i)`, so the output does not depend on how the
/// current rayon pool schedules chunks.
pub(crate) fn map_chunks<T, F>(samples: u64, seed: u64, job: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK_SAMPLES);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = CHUNK_SAMPLES.min(samples - c * CHUNK_SAMPLES);
            let mut rng = derive_stream(seed, job, c);
            work(&mut rng, len)
        })
        .collect()
}
