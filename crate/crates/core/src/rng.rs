//! Seeded, splittable random streams.
//!
//! Every consumer of randomness asks for a stream by `(seed, index)`. ChaCha
//! streams with distinct indices are independent, so work can be split into
//! blocks and scheduled on any number of threads without changing results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Child stream `index` of the root `seed`.
pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn head(mut rng: Stream) -> Vec<u64> {
        (0..8).map(|_| rng.random()).collect()
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        assert_eq!(head(stream(7, 3)), head(stream(7, 3)));
        assert_ne!(head(stream(7, 3)), head(stream(7, 4)));
        assert_ne!(head(stream(7, 3)), head(stream(8, 3)));
    }
}
