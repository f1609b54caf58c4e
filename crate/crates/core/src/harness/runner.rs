//! Batched execution on split RNG streams.

use rayon::prelude::*;

use crate::rng::{batch_stream, SoupRng};

/// Environment variable that caps the worker count.
pub const THREADS_ENV: &str = "LOOPSOUP_THREADS";

/// Workers to use: `LOOPSOUP_THREADS` when set to a positive integer,
/// otherwise the available parallelism.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Number of samples assigned to `batch`.
pub fn batch_size(samples: u64, batches: u64, batch: u64) -> u64 {
    samples / batches + u64::from(batch < samples % batches)
}

/// Runs `work(batch, rng, count)` for every batch, each on its own stream,
/// and returns the results in batch order.
pub fn run_batches<T, F>(seed: u64, samples: u64, batches: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut SoupRng, u64) -> T + Sync,
{
    let job = || {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut rng = batch_stream(seed, b);
                work(b, &mut rng, batch_size(samples, batches, b))
            })
            .collect()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(thread_count()).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// [`run_batches`] followed by a left fold in batch order.
pub fn run_reduce<T, F, M>(seed: u64, samples: u64, batches: u64, work: F, mut merge: M) -> Option<T>
where
    T: Send,
    F: Fn(u64, &mut SoupRng, u64) -> T + Sync,
    M: FnMut(&mut T, T),
{
    let mut parts = run_batches(seed, samples, batches, work).into_iter();
    let mut acc = parts.next()?;
    for p in parts {
        merge(&mut acc, p);
    }
    Some(acc)
}
