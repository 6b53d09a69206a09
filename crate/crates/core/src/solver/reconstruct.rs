use num_complex::Complex64;

use super::init::spectral_init_detailed;
use super::objective::evaluate;
use super::params::SolverParams;
use super::threshold::hard_threshold;
use super::report::ReconstructionReport;
use crate::error::{Error, Result};
use crate::forward::{MeasurementSet, SensingEnsemble};
use crate::grid::{inner, norm2};
use crate::metrics::relative_error;

const STALL_TOL: f64 = 1e-12;
const STALL_RUN: usize = 10;

/// Recovers a Fourier-sparse signal from intensities `g` taken with `ens`.
///
/// `reference`, when given, only feeds the error trace and the initializer
/// diagnostics. Negative intensities (from additive noise) are clamped to
/// zero.
pub fn reconstruct(
    g: &MeasurementSet,
    ens: &SensingEnsemble,
    params: &SolverParams,
    reference: Option<&[Complex64]>,
) -> Result<ReconstructionReport> {
    let n = ens.n();
    params.validate(n)?;
    g.check_ensemble(ens)?;
    if let Some(x) = reference {
        if x.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: x.len() });
        }
        if norm2(x) == 0.0 {
            return Err(Error::ZeroReference);
        }
    }
    if let Some((index, &value)) = g.values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::DegenerateData(format!("intensity {index} is {value}")));
    }

    let (gain, work) = if params.isotropic_scaling {
        let gain = ens.isotropic_gain();
        (gain, ens.clone().with_gain(gain * ens.gain()))
    } else {
        (1.0, ens.clone())
    };
    let power = gain * gain;
    let scaled: Vec<f64> = g.values.iter().map(|v| v.max(0.0) * power).collect();
    let amp: Vec<f64> = scaled.iter().map(|v| v.sqrt()).collect();

    let init = spectral_init_detailed(&scaled, &work, params.sparsity, params.alpha_y)?;
    let fourier = work.fourier();
    let mut z = init.estimate.clone();
    let mut spectrum = fourier.forward_vec(&z);

    let capacity = params.iterations;
    let mut mu_trace = Vec::with_capacity(capacity);
    let mut grad_norm_trace = Vec::with_capacity(capacity);
    let mut objective_trace = Vec::with_capacity(capacity);
    let mut support_trace = Vec::with_capacity(capacity);
    let mut error_trace = reference.map(|_| Vec::with_capacity(capacity));

    let mut mu = params.mu0;
    let mut cached = None;
    let mut stalled = 0;
    for t in 0..params.iterations {
        let grad = match cached.take() {
            Some(grad) => grad,
            None => evaluate(&z, &amp, &work, mu)?.1,
        };
        let mut step: Vec<Complex64> = z.iter().zip(&grad).map(|(a, b)| a - b * params.tau).collect();
        fourier.forward(&mut step);
        let next_spectrum = hard_threshold(&step, params.sparsity);
        let next = fourier.inverse_vec(&next_spectrum);
        if next.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Divergence(t + 1));
        }
        let change = norm2(&next.iter().zip(&z).map(|(a, b)| a - b).collect::<Vec<_>>());
        let scale = norm2(&next);
        z = next;
        spectrum = next_spectrum;

        let (value, grad_next) = evaluate(&z, &amp, &work, mu)?;
        let grad_norm = norm2(&grad_next);
        if !value.is_finite() || !grad_norm.is_finite() {
            return Err(Error::Divergence(t + 1));
        }
        mu_trace.push(mu);
        grad_norm_trace.push(grad_norm);
        objective_trace.push(value);
        support_trace.push(spectrum.iter().filter(|c| c.norm() > 0.0).count());
        if let (Some(trace), Some(x)) = (error_trace.as_mut(), reference) {
            trace.push(relative_error(&z, x)?);
        }

        if grad_norm >= params.gamma * mu {
            cached = Some(grad_next);
        } else {
            mu *= params.gamma1;
        }

        if params.early_stop {
            if change <= STALL_TOL * scale.max(f64::MIN_POSITIVE) {
                stalled += 1;
                if stalled >= STALL_RUN {
                    break;
                }
            } else {
                stalled = 0;
            }
        }
    }

    let (init_correlation, init_error) = match reference {
        Some(x) => {
            let size = norm2(&init.estimate);
            let corr = if size == 0.0 {
                0.0
            } else {
                inner(&init.estimate, x).norm() / (size * norm2(x))
            };
            (Some(corr), Some(relative_error(&init.estimate, x)?))
        }
        None => (None, None),
    };

    Ok(ReconstructionReport {
        iterations_run: mu_trace.len(),
        estimate: z,
        spectrum,
        init_estimate: init.estimate,
        init_support: init.support,
        mu_trace,
        grad_norm_trace,
        objective_trace,
        support_trace,
        error_trace,
        init_correlation,
        init_error,
        gain,
    })
}
