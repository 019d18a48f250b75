//! Seeded, splittable random streams.
//!
//! Every randomized routine takes a [`StreamRng`]. A stream is identified by
//! `(seed, stream)`; the underlying generator is ChaCha20 keyed by `seed`
//! with its 64-bit stream counter set to `stream`, so distinct streams of the
//! same seed never overlap and results are bit-reproducible across
//! platforms. Drawing from a stream advances it: two consecutive calls see
//! consecutive segments of the same sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub type StreamRng = ChaCha20Rng;

/// Root stream of `seed` (stream id 0).
pub fn seeded(seed: u64) -> StreamRng {
    stream(seed, 0)
}

/// Independent stream `id` derived from `seed`.
pub fn stream(seed: u64, id: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Draw a fresh seed for a child computation from `rng`.
pub fn child_seed(rng: &mut StreamRng) -> u64 {
    rng.random()
}

pub fn standard_normal(rng: &mut StreamRng) -> f64 {
    rng.sample(StandardNormal)
}
