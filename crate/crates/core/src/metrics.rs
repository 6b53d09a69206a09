//! Phase-invariant error measures and success statistics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{inner, norm2};

pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 1e-5;

/// `min_theta ||x e^{-j theta} - z||_2`.
///
/// The minimizer rotates `x` by the phase of `x^H z`.
pub fn dist(z: &[Complex64], x: &[Complex64]) -> Result<f64> {
    if z.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: z.len(),
        });
    }
    let overlap = inner(x, z);
    let rotation = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(x
        .iter()
        .zip(z)
        .map(|(a, b)| (a * rotation - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

pub fn relative_error(z: &[Complex64], x: &[Complex64]) -> Result<f64> {
    let reference = norm2(x);
    if reference == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok(dist(z, x)? / reference)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub rel_error: f64,
    pub success: bool,
    pub seed: u64,
    pub config_id: String,
}

impl TrialOutcome {
    pub fn new(rel_error: f64, threshold: f64, seed: u64, config_id: impl Into<String>) -> Self {
        Self {
            rel_error,
            success: rel_error <= threshold,
            seed,
            config_id: config_id.into(),
        }
    }
}

pub fn success_rate(outcomes: &[TrialOutcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::Empty("trial outcomes"));
    }
    let hits = outcomes.iter().filter(|o| o.success).count();
    Ok(hits as f64 / outcomes.len() as f64)
}
