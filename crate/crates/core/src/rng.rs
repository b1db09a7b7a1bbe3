//! Reproducible random streams.
//!
//! Every experiment takes one 64-bit seed. Replica `r` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` with its stream id set to `r`, so the
//! stream of a replica depends only on `(seed, r)` and never on how many
//! other replicas run or on which thread it runs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ExperimentRng = ChaCha8Rng;

/// Stream used for single-stream experiments.
pub fn master(seed: u64) -> ExperimentRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream for replica `index`.
pub fn replica(seed: u64, index: u64) -> ExperimentRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}
