//! Reproducible random streams.
//!
//! Every random quantity comes from `ChaCha8Rng` seeded with a 64-bit seed
//! through `SeedableRng::seed_from_u64`. Work split into batches uses one
//! ChaCha stream per batch index (`set_stream(batch)`), so a batch's draws do
//! not depend on how many batches exist or which thread runs it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SoupRng = ChaCha8Rng;

/// The generator for `seed`, stream 0.
pub fn seeded(seed: u64) -> SoupRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The generator for batch `batch` of a run seeded with `seed`.
pub fn batch_stream(seed: u64, batch: u64) -> SoupRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}
