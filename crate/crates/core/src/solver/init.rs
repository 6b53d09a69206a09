use num_complex::Complex64;

use super::threshold::select_support;
use crate::error::{Error, Result};
use crate::forward::{adjoint_field, field, SensingEnsemble};
use crate::grid::{inner, norm2};

const POWER_ITERATIONS: usize = 200;
const POWER_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SpectralInit {
    /// Initial estimate in the signal domain.
    pub estimate: Vec<Complex64>,
    /// Selected Fourier support, increasing.
    pub support: Vec<usize>,
    /// Leading eigenvalue of the truncated matrix restricted to the support.
    pub eigenvalue: f64,
    pub iterations: usize,
    /// Number of measurements that passed the truncation.
    pub kept: usize,
}

/// Truncated spectral initialization on an estimated Fourier support.
pub fn spectral_init(g: &[f64], ens: &SensingEnsemble, s: usize, alpha_y: f64) -> Result<Vec<Complex64>> {
    Ok(spectral_init_detailed(g, ens, s, alpha_y)?.estimate)
}

/// As [`spectral_init`], also returning support and eigenpair diagnostics.
///
/// The leading eigenvector of
/// `H = (1/m) sum_k g_k 1{g_k <= alpha_y^2 phi^2} a_J a_J^H`, with `a = F b_k`
/// restricted to the support `J` and `phi^2` the mean intensity, is found by
/// power iteration. It is scaled by `sqrt(n phi^2 / m)` and mapped back with
/// `F^H`.
pub fn spectral_init_detailed(g: &[f64], ens: &SensingEnsemble, s: usize, alpha_y: f64) -> Result<SpectralInit> {
    let n = ens.n();
    let m = ens.m();
    if g.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: g.len() });
    }
    if let Some((index, &value)) = g.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
        return Err(Error::NegativeIntensity { index, value });
    }
    let support = select_support(g, ens, s)?;
    let phi2 = g.iter().sum::<f64>() / m as f64;
    if phi2 == 0.0 {
        return Ok(SpectralInit {
            estimate: vec![Complex64::default(); n],
            support,
            eigenvalue: 0.0,
            iterations: 0,
            kept: m,
        });
    }
    let cutoff = alpha_y * alpha_y * phi2;
    let weights: Vec<f64> = g.iter().map(|&v| if v <= cutoff { v } else { 0.0 }).collect();
    let kept = g.iter().filter(|&&v| v <= cutoff).count();
    if kept == 0 {
        return Err(Error::DegenerateData("every measurement exceeds the truncation level".into()));
    }

    let fourier = ens.fourier();
    let apply = |v: &[Complex64]| -> Result<Vec<Complex64>> {
        let c = field(&fourier.inverse_vec(v), ens)?;
        let weighted: Vec<Complex64> = c.iter().zip(&weights).map(|(ck, w)| ck * (w / m as f64)).collect();
        let full = fourier.forward_vec(&adjoint_field(&weighted, ens)?);
        let mut out = vec![Complex64::default(); n];
        for &q in &support {
            out[q] = full[q];
        }
        Ok(out)
    };

    let mut v = vec![Complex64::default(); n];
    let start = 1.0 / (support.len() as f64).sqrt();
    for &q in &support {
        v[q] = Complex64::new(start, 0.0);
    }
    let mut eigenvalue = 0.0;
    let mut iterations = 0;
    while iterations < POWER_ITERATIONS {
        iterations += 1;
        let hv = apply(&v)?;
        let rayleigh = inner(&v, &hv).re;
        let size = norm2(&hv);
        if size == 0.0 {
            eigenvalue = 0.0;
            break;
        }
        v = hv.into_iter().map(|c| c / size).collect();
        let change = (rayleigh - eigenvalue).abs();
        eigenvalue = rayleigh;
        if change <= POWER_TOL * rayleigh.abs() {
            break;
        }
    }

    let scale = (n as f64 * phi2 / m as f64).sqrt();
    let scaled: Vec<Complex64> = v.iter().map(|c| c * scale).collect();
    Ok(SpectralInit {
        estimate: fourier.inverse_vec(&scaled),
        support,
        eigenvalue,
        iterations,
        kept,
    })
}
