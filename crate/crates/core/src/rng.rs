//! Deterministic random streams for the Monte Carlo estimators.
//!
//! Every estimator splits its sample budget into fixed-size chunks and gives
//! chunk `k` the ChaCha stream `k` under the caller's seed. Chunk results are
//! reduced in chunk order, so estimates are bitwise identical for any rayon
//! thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type SimRng = ChaCha8Rng;

/// Samples per parallel work unit.
pub const CHUNK: usize = 1 << 16;

/// Independent stream `stream` under `seed`.
pub fn substream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed, e.g. one per point of a parameter grid.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs `work(len, rng)` over `n` samples split into [`CHUNK`]-sized pieces,
/// returning the per-chunk results in chunk order.
pub fn par_chunks<T, F>(n: usize, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut SimRng) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK.min(n - k * CHUNK);
            let mut rng = substream(seed, k as u64);
            work(len, &mut rng)
        })
        .collect()
}
