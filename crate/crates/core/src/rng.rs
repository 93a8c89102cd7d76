//! Seed handling. Every randomized routine takes an explicit stream; parallel
//! Monte Carlo loops derive per-chunk substreams from a base seed so results do
//! not depend on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub type Stream = ChaCha8Rng;

/// Samples per parallel chunk. Fixed so the chunk → substream map is stable.
pub const CHUNK: usize = 8192;

/// Stream derived by hashing `(master, component, index)`.
pub fn substream(master: u64, component: &str, index: u64) -> Stream {
    let mut h = Sha256::new();
    h.update(master.to_le_bytes());
    h.update((component.len() as u64).to_le_bytes());
    h.update(component.as_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest[..32]);
    Stream::from_seed(seed)
}

pub fn seeded(seed: u64) -> Stream {
    substream(seed, "root", 0)
}

/// Draws a base seed from `rng` for deriving chunk substreams.
pub fn fork_seed<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    rng.random()
}

/// Counts successes of `trial` over `n` draws, in parallel, deterministically.
pub fn par_count<F>(n: usize, base: u64, component: &str, trial: F) -> u64
where
    F: Fn(&mut Stream) -> bool + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(base, component, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum()
}

/// Collects `n` samples in parallel; output order is the sample index order.
pub fn par_collect<T, F>(n: usize, base: u64, component: &str, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Stream) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(base, component, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Runs `task(i, stream_i)` for each index with its own substream.
pub fn par_indexed<T, F>(n: usize, base: u64, component: &str, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut Stream) -> T + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(base, component, i as u64);
            task(i, &mut rng)
        })
        .collect()
}
