//! Seed-derived random streams.
//!
//! Every unit of parallel work (an optimizer start, a scan chunk, a tomography
//! resample) draws from its own ChaCha stream selected by index, which keeps
//! results independent of the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream `stream` of the generator family keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Radical inverse of `index` in the given prime base (van der Corput).
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while index > 0 {
        out += (index % base) as f64 * scale;
        index /= base;
        scale *= inv;
    }
    out
}

/// Point `index` of the Halton sequence in `[0, 1)^D` using the first `D` primes.
pub fn halton<const D: usize>(index: u64) -> [f64; D] {
    const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];
    assert!(D <= PRIMES.len());
    std::array::from_fn(|d| radical_inverse(index, PRIMES[d]))
}
