//! Seeded random streams.
//!
//! Every random draw in the crate goes through ChaCha8 so that a `(seed,
//! stream)` pair pins the output on every platform. Parallel work derives one
//! stream per task index, which keeps results independent of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type PermRng = ChaCha8Rng;

pub fn from_seed(seed: u64) -> PermRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` of the generator seeded with `seed`.
pub fn stream(seed: u64, stream: u64) -> PermRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
