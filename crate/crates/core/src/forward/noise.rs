use rand_distr::{Distribution, Normal};

use super::measurement::{MeasurementSet, NoiseInfo};
use crate::rng::rng_from_seed;

/// Noise standard deviation giving `snr_db = 20 log10(||g||_2 / (m sigma))`.
pub fn noise_sigma(g: &MeasurementSet, snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY || g.is_empty() {
        return 0.0;
    }
    g.norm() / (g.len() as f64 * 10f64.powf(snr_db / 20.0))
}

/// Adds i.i.d. `N(0, sigma^2)` to every intensity and clamps at zero.
pub fn add_noise(g: &MeasurementSet, snr_db: f64, seed: u64) -> MeasurementSet {
    let sigma = noise_sigma(g, snr_db);
    let mut out = g.clone();
    if sigma > 0.0 && sigma.is_finite() {
        let normal = Normal::new(0.0, sigma).expect("finite positive sigma");
        let mut rng = rng_from_seed(seed);
        for v in &mut out.values {
            *v = (*v + normal.sample(&mut rng)).max(0.0);
        }
    }
    out.noise = Some(NoiseInfo { snr_db, sigma, seed });
    out
}
