//! Seeded generator streams.
//!
//! Every random object is drawn from a ChaCha8 stream keyed by a 64-bit seed
//! and a stream index, so results do not depend on scheduling.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for child `index` of `seed` (trial `i`, or a sub-purpose inside a trial).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix(mix(seed) ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

/// Generator for `(seed, block)`.
pub fn stream(seed: u64, block: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block as u64);
    rng
}

/// Complex normal with `E|z|² = 1`.
pub fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(rows, cols);
    // Row-major fill keeps the draw order independent of storage layout.
    for r in 0..rows {
        for c in 0..cols {
            m[(r, c)] = complex_gaussian(rng);
        }
    }
    m
}
