//! Numerical checks of the operator facts behind exact recovery: the Gram
//! identity of the sampling matrix, its spectral norm, and the RIP-like
//! bound of the lifted operator on tangent directions.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forward::{adjoint_field, explicit_matrix, field, SensingEnsemble};
use crate::grid::{dense_dft_matrix, inner, norm2};
use crate::rng::{complex_gaussian, derive_seed, rng_from_seed};

const HERMITIAN_TOL: f64 = 1e-12;
const POWER_ITERATIONS: usize = 1000;
const POWER_TOL: f64 = 1e-14;
const POWER_SEED: u64 = 0x5eed;

/// `W = x w^H + w x^H`, kept in factored form.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentElement {
    pub anchor: Vec<Complex64>,
    pub direction: Vec<Complex64>,
}

impl TangentElement {
    pub fn new(anchor: Vec<Complex64>, direction: Vec<Complex64>) -> Result<Self> {
        if anchor.len() != direction.len() {
            return Err(Error::LengthMismatch {
                expected: anchor.len(),
                got: direction.len(),
            });
        }
        Ok(Self { anchor, direction })
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let x = DMatrix::from_column_slice(self.anchor.len(), 1, &self.anchor);
        let w = DMatrix::from_column_slice(self.direction.len(), 1, &self.direction);
        &x * w.adjoint() + &w * x.adjoint()
    }
}

/// `B(W)_k = b_k^H W b_k` for a tangent element, from two field evaluations.
pub fn apply_b_operator(w: &TangentElement, ens: &SensingEnsemble) -> Result<Vec<f64>> {
    let cx = field(&w.anchor, ens)?;
    let cw = field(&w.direction, ens)?;
    Ok(cx.iter().zip(&cw).map(|(a, b)| 2.0 * (a * b.conj()).re).collect())
}

/// `B(W)` for an explicit Hermitian matrix, using the dense sampling matrix.
pub fn apply_b_operator_dense(w: &DMatrix<Complex64>, ens: &SensingEnsemble) -> Result<Vec<f64>> {
    let n = ens.n();
    if w.nrows() != n || w.ncols() != n {
        return Err(Error::ShapeMismatch(vec![w.nrows(), w.ncols()], vec![n, n]));
    }
    let deviation = (w - w.adjoint()).norm();
    if deviation > HERMITIAN_TOL * w.norm().max(1.0) {
        return Err(Error::NotHermitian(deviation));
    }
    // row k of the dense matrix is b_k^H
    let b = explicit_matrix(ens)?;
    let bw = &b * w;
    Ok((0..ens.m())
        .map(|k| (0..n).map(|j| bw[(k, j)] * b[(k, j)].conj()).sum::<Complex64>().re)
        .collect())
}

/// Nuclear norm of `x w^H + w x^H`.
///
/// The two nonzero eigenvalues have product `|x^H w|^2 - ||x||^2 ||w||^2 <= 0`,
/// so the norm is their difference, `2 sqrt(||x||^2 ||w||^2 - Im(x^H w)^2)`.
pub fn nuclear_norm_rank2(w: &TangentElement) -> f64 {
    let xx = norm2(&w.anchor).powi(2);
    let ww = norm2(&w.direction).powi(2);
    let cross = inner(&w.anchor, &w.direction).im;
    2.0 * (xx * ww - cross * cross).max(0.0).sqrt()
}

/// `gain^2 sum_p |d_p|^2`, the diagonal that `B^H B` collapses to in the
/// Fourier frame.
fn gram_target(ens: &SensingEnsemble) -> Vec<f64> {
    let mut target = vec![0.0; ens.n()];
    for p in 0..ens.num_distances() {
        for (t, d) in target.iter_mut().zip(&ens.aperture(p).values) {
            *t += d.norm_sqr();
        }
    }
    let power = ens.gain() * ens.gain();
    target.iter().map(|t| t * power).collect()
}

fn relative_residual(gram: &DMatrix<Complex64>, target: &[f64]) -> f64 {
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        target.len(),
        target.iter().map(|&t| Complex64::new(t, 0.0)),
    ));
    let scale = diag.norm();
    let residual = (gram - &diag).norm();
    if scale > 0.0 {
        residual / scale
    } else {
        residual
    }
}

/// `||C^H C - gain^2 sum_p diag(|d_p|^2)||_F / ||gain^2 sum_p diag(|d_p|^2)||_F`
/// with `C = B F^H`, the sampling matrix acting on Fourier coefficients.
///
/// Transfer functions are unitary and the region selectors sum to the
/// identity, so every aperture collapses to a diagonal in this frame.
pub fn check_gram_identity(ens: &SensingEnsemble) -> Result<f64> {
    let b = explicit_matrix(ens)?;
    let c = b * dense_dft_matrix(ens.shape()).adjoint();
    Ok(relative_residual(&(c.adjoint() * c), &gram_target(ens)))
}

/// Same residual for `B^H B` itself, in signal coordinates. Equals
/// `F^H diag(.) F` there, so it is diagonal only when `sum_p |d_p|^2` is
/// constant.
pub fn gram_residual_signal_frame(ens: &SensingEnsemble) -> Result<f64> {
    let b = explicit_matrix(ens)?;
    Ok(relative_residual(&(b.adjoint() * b), &gram_target(ens)))
}

/// `(1/m) lambda_max(B^H B)` by power iteration on `field` and its adjoint.
pub fn spectral_quantity(ens: &SensingEnsemble) -> Result<f64> {
    let n = ens.n();
    let mut rng = rng_from_seed(POWER_SEED);
    let mut v: Vec<Complex64> = (0..n).map(|_| complex_gaussian(&mut rng)).collect();
    let size = norm2(&v);
    v.iter_mut().for_each(|c| *c /= size);
    let mut lambda = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let next = adjoint_field(&field(&v, ens)?, ens)?;
        let rayleigh = inner(&v, &next).re;
        let size = norm2(&next);
        if size == 0.0 {
            return Ok(0.0);
        }
        v = next.into_iter().map(|c| c / size).collect();
        let change = (rayleigh - lambda).abs();
        lambda = rayleigh;
        if change <= POWER_TOL * rayleigh {
            break;
        }
    }
    Ok(lambda / ens.m() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionTrial {
    /// `||B(W)||_1`.
    pub b_l1: f64,
    /// `||W||_1`.
    pub w_nuclear: f64,
    /// `(1/m) ||B(W)||_1 / ||W||_1`.
    pub ratio: f64,
}

/// Spot check of the RIP-like bound over random tangent directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub delta_target: f64,
    pub trials: Vec<ConditionTrial>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `(1/m) lambda_max(B^H B)`.
    pub spectral_quantity: f64,
    /// `None` when the dense operator exceeds the size guard.
    pub gram_residual: Option<f64>,
    pub gain: f64,
    pub mode: String,
    pub m: usize,
}

impl ConditionReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.trials.iter().map(|t| t.ratio).collect()
    }

    pub fn upper_bound_holds(&self) -> bool {
        self.max_ratio <= 1.0 + self.delta_target
    }

    /// Largest relative excess of `||B(W)||_1` over `||W||_1 lambda_max(B^H B)`;
    /// nonpositive when the deterministic upper bound holds on every trial.
    pub fn max_bound_excess(&self) -> f64 {
        let lambda = self.spectral_quantity * self.m as f64;
        self.trials
            .iter()
            .map(|t| {
                let bound = t.w_nuclear * lambda;
                if bound > 0.0 {
                    (t.b_l1 - bound) / bound
                } else {
                    t.b_l1
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let gram = self.gram_residual.map(|g| format!("{g:e}")).unwrap_or_else(|| "skipped".into());
        let _ = writeln!(out, "# delta_target = {}", self.delta_target);
        let _ = writeln!(out, "# min_ratio = {:e}", self.min_ratio);
        let _ = writeln!(out, "# max_ratio = {:e}", self.max_ratio);
        let _ = writeln!(out, "# spectral_quantity = {:e}", self.spectral_quantity);
        let _ = writeln!(out, "# gram_residual = {gram}");
        let _ = writeln!(out, "# gain = {}", self.gain);
        let _ = writeln!(out, "# mode = {}", self.mode);
        let _ = writeln!(out, "# sampling = random gaussian directions (spot check)");
        out.push_str("trial,ratio\n");
        for (l, t) in self.trials.iter().enumerate() {
            let _ = writeln!(out, "{l},{:e}", t.ratio);
        }
        out
    }
}

/// `(1/m) ||B(W)||_1 / ||W||_1` together with both norms.
pub fn condition_trial(w: &TangentElement, ens: &SensingEnsemble) -> Result<ConditionTrial> {
    let b_l1: f64 = apply_b_operator(w, ens)?.iter().map(|v| v.abs()).sum();
    let w_nuclear = nuclear_norm_rank2(w);
    let ratio = if w_nuclear > 0.0 {
        b_l1 / (ens.m() as f64 * w_nuclear)
    } else {
        0.0
    };
    Ok(ConditionTrial { b_l1, w_nuclear, ratio })
}

/// Samples `trials` tangent elements at `x` with standard complex Gaussian
/// directions; trial `l` draws from a seed derived from `(seed, l)`.
pub fn sample_condition1(
    x: &[Complex64],
    ens: &SensingEnsemble,
    trials: usize,
    seed: u64,
    delta_target: f64,
) -> Result<ConditionReport> {
    if trials == 0 {
        return Err(Error::Empty("condition trials"));
    }
    if x.len() != ens.n() {
        return Err(Error::LengthMismatch { expected: ens.n(), got: x.len() });
    }
    let samples = (0..trials)
        .into_par_iter()
        .map(|l| {
            let mut rng = rng_from_seed(derive_seed(seed, 0, l as u64));
            let direction = (0..x.len()).map(|_| complex_gaussian(&mut rng)).collect();
            condition_trial(&TangentElement::new(x.to_vec(), direction)?, ens)
        })
        .collect::<Result<Vec<_>>>()?;
    let min_ratio = samples.iter().map(|t| t.ratio).fold(f64::INFINITY, f64::min);
    let max_ratio = samples.iter().map(|t| t.ratio).fold(f64::NEG_INFINITY, f64::max);
    let gram_residual = match check_gram_identity(ens) {
        Ok(r) => Some(r),
        Err(Error::SizeGuard { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(ConditionReport {
        delta_target,
        trials: samples,
        min_ratio,
        max_ratio,
        spectral_quantity: spectral_quantity(ens)?,
        gram_residual,
        gain: ens.gain(),
        mode: ens.mode().to_string(),
        m: ens.m(),
    })
}
