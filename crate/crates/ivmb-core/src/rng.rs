//! Counter-based random number generation.
//!
//! Sampling must be bit-reproducible at any parallelism degree, so instead
//! of drawing from one sequential stream, every normal variate is addressed
//! by a `(seed, stream, row)` coordinate: the ChaCha8 generator is keyed by
//! the seed, `set_stream` selects the per-variable stream, and the word
//! position is derived from the row index. Each coordinate consumes a fixed
//! number of generator words, so values never depend on evaluation order.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Words of ChaCha output consumed per normal variate (two u64 = four
/// 32-bit words).
const WORDS_PER_DRAW: u128 = 4;

/// Addressable source of standard-normal variates.
///
/// Two draws at the same `(seed, stream, row)` agree bitwise; draws at
/// different coordinates are independent ChaCha8 outputs.
#[derive(Debug, Clone, Copy)]
pub struct CounterRng {
    seed: u64,
}

impl CounterRng {
    /// Create a generator keyed by `seed`.
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// The seed this generator is keyed by.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Standard-normal variate addressed by `(stream, row)`.
    ///
    /// Uses the cosine branch of the Box–Muller transform on two uniform
    /// draws, so exactly [`WORDS_PER_DRAW`] generator words are consumed
    /// per coordinate.
    pub fn standard_normal(&self, stream: u64, row: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng.set_word_pos(row as u128 * WORDS_PER_DRAW);
        let a = rng.next_u64();
        let b = rng.next_u64();
        // Map to (0, 1]: the +1 keeps the log argument strictly positive.
        let u1 = ((a >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = (b >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Sequential ChaCha8 generator for shuffles and subsampling, derived from
/// a root seed and a purpose tag so distinct uses never share a stream.
///
/// The tag spaces used by this crate: variable streams for sampling occupy
/// low stream indices, so utility generators should pass tags offset by
/// the caller (e.g. `u64::MAX - k`).
pub fn derived_rng(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}

/// Deterministic Fisher–Yates permutation of `0..n` from `(seed, tag)`.
pub fn seeded_permutation(seed: u64, tag: u64, n: usize) -> Vec<usize> {
    let mut rng = derived_rng(seed, tag);
    let mut idx: Vec<usize> = (0..n).collect();
    // Manual Fisher–Yates: stable across `rand` helper changes.
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    idx
}
