use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::{adjoint_field, field, SensingEnsemble};

/// `sqrt(w^2 + mu^2)`.
pub fn smoothing_phi(w: f64, mu: f64) -> f64 {
    w.hypot(mu)
}

fn amplitudes(g: &[f64], m: usize) -> Result<Vec<f64>> {
    if g.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: g.len() });
    }
    g.iter()
        .enumerate()
        .map(|(index, &value)| {
            if value >= 0.0 {
                Ok(value.sqrt())
            } else {
                Err(Error::NegativeIntensity { index, value })
            }
        })
        .collect()
}

fn check_mu(mu: f64) -> Result<()> {
    if mu >= 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("smoothing parameter {mu} must be finite and nonnegative")))
    }
}

/// `(1/m) sum_k (sqrt(g_k) - phi_mu(|b_k^H z|))^2`.
pub fn objective(z: &[Complex64], g: &[f64], ens: &SensingEnsemble, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let amp = amplitudes(g, ens.m())?;
    let c = field(z, ens)?;
    Ok(objective_from_field(&c, &amp, mu))
}

/// Wirtinger gradient
/// `(2/m) sum_k (b_k^H z - sqrt(g_k) b_k^H z / phi_mu(|b_k^H z|)) b_k`.
///
/// With this normalization the first-order change of the objective along
/// `d` is `Re <grad, d>`.
pub fn gradient(z: &[Complex64], g: &[f64], ens: &SensingEnsemble, mu: f64) -> Result<Vec<Complex64>> {
    check_mu(mu)?;
    let amp = amplitudes(g, ens.m())?;
    Ok(evaluate(z, &amp, ens, mu)?.1)
}

fn objective_from_field(c: &[Complex64], amp: &[f64], mu: f64) -> f64 {
    let total: f64 = c
        .iter()
        .zip(amp)
        .map(|(ck, a)| (a - smoothing_phi(ck.norm(), mu)).powi(2))
        .sum();
    total / c.len() as f64
}

/// Objective and gradient from precomputed amplitudes `sqrt(g)`, sharing one
/// forward pass.
pub(crate) fn evaluate(
    z: &[Complex64],
    amp: &[f64],
    ens: &SensingEnsemble,
    mu: f64,
) -> Result<(f64, Vec<Complex64>)> {
    let c = field(z, ens)?;
    let value = objective_from_field(&c, amp, mu);
    let m = c.len() as f64;
    let mut residual = Vec::with_capacity(c.len());
    for (k, (ck, a)) in c.iter().zip(amp).enumerate() {
        let phi = smoothing_phi(ck.norm(), mu);
        if phi == 0.0 {
            if *a == 0.0 {
                residual.push(Complex64::default());
                continue;
            }
            return Err(Error::SingularGradient(k));
        }
        residual.push((ck - ck * (a / phi)) * (2.0 / m));
    }
    Ok((value, adjoint_field(&residual, ens)?))
}
