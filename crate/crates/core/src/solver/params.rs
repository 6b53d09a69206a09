use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Algorithm constants. Defaults are the published cross-validated values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverParams {
    /// Step size.
    pub tau: f64,
    /// Smoothing is kept while `||grad|| >= gamma * mu`.
    pub gamma: f64,
    /// Smoothing shrink factor.
    pub gamma1: f64,
    pub mu0: f64,
    pub iterations: usize,
    /// Number of Fourier coefficients kept; zero means "take it from the
    /// experiment".
    pub sparsity: usize,
    /// Truncation constant of the initializer.
    pub alpha_y: f64,
    /// Rescale the sampling vectors so that `(1/m) B^H B` has unit mean
    /// eigenvalue before running. With a unitary DFT the raw vectors have
    /// `(1/m) B^H B ~ I / n`, which makes the default step size vanishingly
    /// small.
    pub isotropic_scaling: bool,
    /// Stop once the relative iterate change stays below `1e-12` for ten
    /// consecutive iterations.
    pub early_stop: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tau: 0.3,
            gamma: 0.8,
            gamma1: 0.5,
            mu0: 60.0,
            iterations: 800,
            sparsity: 0,
            alpha_y: 3.0,
            isotropic_scaling: true,
            early_stop: false,
        }
    }
}

impl SolverParams {
    pub fn with_sparsity(sparsity: usize) -> Self {
        Self {
            sparsity,
            ..Self::default()
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if !open_unit(self.tau) {
            return fail(format!("tau = {} not in (0, 1)", self.tau));
        }
        if !open_unit(self.gamma) || !open_unit(self.gamma1) {
            return fail(format!("gamma = {}, gamma1 = {} must lie in (0, 1)", self.gamma, self.gamma1));
        }
        if !(self.mu0 > 0.0 && self.mu0.is_finite()) {
            return fail(format!("mu0 = {} must be positive", self.mu0));
        }
        if self.iterations < 1 {
            return fail("at least one iteration required".into());
        }
        if self.sparsity < 1 || self.sparsity > n {
            return Err(Error::InvalidSparsity { s: self.sparsity, n });
        }
        if !(self.alpha_y > 0.0) {
            return fail(format!("alpha_y = {} must be positive", self.alpha_y));
        }
        Ok(())
    }
}
