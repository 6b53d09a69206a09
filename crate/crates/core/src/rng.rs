//! Seeding helpers. Every generator draws from a ChaCha stream keyed by a
//! `u64`, so results are reproducible across platforms.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; a bijection on `u64`.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for `(major, minor)` under `seed`.
///
/// For a fixed parent seed the map is injective in `(major, minor)` as long as
/// both stay below `2^32`; for fixed `(major, minor)` it is injective in the
/// parent seed.
pub fn derive_seed(seed: u64, major: u64, minor: u64) -> u64 {
    debug_assert!(major < (1 << 32) && minor < (1 << 32));
    mix64(mix64(seed) ^ mix64((major << 32) | minor))
}

/// Standard circularly-symmetric complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}
