//! Seeded random streams.
//!
//! Every randomized routine draws from ChaCha8 keyed by the run seed, with the
//! stream number selecting an independent sequence. ChaCha is counter based,
//! so `(seed, stream)` pins the exact bits regardless of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
