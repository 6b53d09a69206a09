use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

/// Output of [`reconstruct`](super::reconstruct) with per-iteration traces.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub estimate: Vec<Complex64>,
    /// Unitary DFT of the estimate; exactly `s`-sparse.
    pub spectrum: Vec<Complex64>,
    pub init_estimate: Vec<Complex64>,
    /// Fourier support picked by the initializer.
    pub init_support: Vec<usize>,
    /// `mu` in effect during each iteration.
    pub mu_trace: Vec<f64>,
    /// Norm of the gradient at the new iterate, evaluated with that iteration's `mu`.
    pub grad_norm_trace: Vec<f64>,
    /// Smoothed objective at the new iterate, in the solver's internal units.
    pub objective_trace: Vec<f64>,
    /// Nonzero Fourier coefficients of each iterate.
    pub support_trace: Vec<usize>,
    /// Relative error per iteration when a reference signal was supplied.
    pub error_trace: Option<Vec<f64>>,
    pub iterations_run: usize,
    pub init_correlation: Option<f64>,
    pub init_error: Option<f64>,
    /// Amplitude gain applied to the sampling vectors while solving.
    pub gain: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub iterations_run: usize,
    pub final_mu: f64,
    pub final_objective: f64,
    pub final_grad_norm: f64,
    pub final_support: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_correlation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_error: Option<f64>,
    pub gain: f64,
}

impl ReconstructionReport {
    pub fn final_error(&self) -> Option<f64> {
        self.error_trace.as_ref().and_then(|t| t.last().copied())
    }

    pub fn summary(&self) -> ReportSummary {
        let last = |v: &[f64]| v.last().copied().unwrap_or(f64::NAN);
        ReportSummary {
            iterations_run: self.iterations_run,
            final_mu: last(&self.mu_trace),
            final_objective: last(&self.objective_trace),
            final_grad_norm: last(&self.grad_norm_trace),
            final_support: self.support_trace.last().copied().unwrap_or(0),
            rel_error: self.final_error(),
            init_correlation: self.init_correlation,
            init_error: self.init_error,
            gain: self.gain,
        }
    }

    /// One CSV row per iteration.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,mu,grad_norm,objective,support,rel_error\n");
        for t in 0..self.iterations_run {
            let err = self
                .error_trace
                .as_ref()
                .map(|e| format!("{:e}", e[t]))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{},{}",
                t + 1,
                self.mu_trace[t],
                self.grad_norm_trace[t],
                self.objective_trace[t],
                self.support_trace[t],
                err
            );
        }
        out
    }
}
