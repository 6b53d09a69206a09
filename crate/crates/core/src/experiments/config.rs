use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::aperture::ApertureKind;
use crate::error::{Error, Result};
use crate::forward::{default_distances, ApertureMode, EnsembleSpec};
use crate::grid::GridShape;
use crate::signal::Lattice;
use crate::solver::SolverParams;

/// Test object for the single-run reconstruction experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Phantom {
    Lattice {
        #[serde(flatten)]
        lattice: Lattice,
    },
    /// Random Fourier-sparse signal with `sparsity` nonzero coefficients.
    Random { sparsity: usize },
}

impl Default for Phantom {
    fn default() -> Self {
        Phantom::Lattice {
            lattice: Lattice::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub shape: GridShape,
    /// Sparsity levels of the phase diagram.
    pub sparsity: Vec<usize>,
    /// Distance counts of the phase diagram; `m / n = P R`.
    pub p_values: Vec<usize>,
    pub r_values: Vec<usize>,
    /// Spacing between consecutive distances; half the largest grid extent
    /// when absent.
    pub distance_step: Option<f64>,
    pub wavelength: f64,
    pub aperture: ApertureKind,
    pub aperture_mode: ApertureMode,
    pub trials: usize,
    pub success_threshold: f64,
    pub solver: SolverParams,
    pub snr_db: Option<f64>,
    pub seed: u64,
    pub out: PathBuf,
    /// Distance count of the single-run experiments.
    pub recon_p: usize,
    pub phantom: Phantom,
    pub delta_target: f64,
    pub condition_trials: usize,
    /// Fill the runtime column of the phase diagram. Off by default so that
    /// reruns produce identical bytes.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            shape: GridShape::line(128).expect("nonzero"),
            sparsity: vec![2, 4, 8, 16],
            p_values: vec![1, 2, 3, 4],
            r_values: vec![1],
            distance_step: None,
            wavelength: 1.0,
            aperture: ApertureKind::UniformPhase,
            aperture_mode: ApertureMode::PerDistance,
            trials: 20,
            success_threshold: crate::metrics::DEFAULT_SUCCESS_THRESHOLD,
            solver: SolverParams::default(),
            snr_db: None,
            seed: 0,
            out: PathBuf::from("out"),
            recon_p: 2,
            phantom: Phantom::default(),
            delta_target: 0.5,
            condition_trials: 100,
            record_timing: false,
        }
    }
}

impl ExperimentConfig {
    /// Defaults scaled down so every dense check fits in memory.
    pub fn verify_default() -> Self {
        Self {
            shape: GridShape::line(16).expect("nonzero"),
            p_values: vec![2],
            r_values: vec![2],
            ..Self::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Short content hash of the serialized config.
    /// Digest of everything that affects results; the output directory is excluded.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = PathBuf::from("out");
        let text = canonical.to_toml().unwrap_or_default();
        let digest = Sha256::digest(text.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.shape.len();
        let fail = |msg: String| Err(Error::Config(msg));
        if self.sparsity.is_empty() || self.p_values.is_empty() || self.r_values.is_empty() {
            return fail("sparsity, p_values and r_values must be nonempty".into());
        }
        if let Some(&s) = self.sparsity.iter().find(|&&s| s == 0 || s > n) {
            return fail(format!("sparsity {s} outside 1..={n}"));
        }
        if self.p_values.contains(&0) || self.recon_p == 0 {
            return fail("distance counts must be positive".into());
        }
        if let Some(&r) = self.r_values.iter().find(|&&r| r == 0 || r > n) {
            return fail(format!("region count {r} outside 1..={n}"));
        }
        if self.trials == 0 || self.condition_trials == 0 {
            return fail("trial counts must be positive".into());
        }
        if !(self.wavelength > 0.0 && self.wavelength.is_finite()) {
            return fail(format!("wavelength {} must be positive", self.wavelength));
        }
        if let Some(step) = self.distance_step {
            if !(step >= 0.0 && step.is_finite()) {
                return fail(format!("distance_step {step} must be finite and nonnegative"));
            }
        }
        if !(self.success_threshold > 0.0) {
            return fail("success_threshold must be positive".into());
        }
        if !(self.delta_target > 0.0 && self.delta_target < 1.0) {
            return fail(format!("delta_target {} not in (0, 1)", self.delta_target));
        }
        if self.aperture == ApertureKind::Custom {
            return fail("random experiments need a generated aperture kind".into());
        }
        if matches!(self.snr_db, Some(v) if v.is_nan()) {
            return fail("snr_db is NaN".into());
        }
        if let Phantom::Random { sparsity } = self.phantom {
            if sparsity == 0 || sparsity > n {
                return fail(format!("phantom sparsity {sparsity} outside 1..={n}"));
            }
        }
        let mut probe = self.solver.clone();
        probe.sparsity = 1;
        probe.validate(n).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn distances(&self, count: usize) -> Vec<f64> {
        match self.distance_step {
            Some(step) => (0..count).map(|p| p as f64 * step).collect(),
            None => default_distances(&self.shape, count),
        }
    }

    pub fn ensemble_spec(&self, num_distances: usize, regions: usize, seed: u64) -> EnsembleSpec {
        EnsembleSpec {
            shape: self.shape.clone(),
            distances: self.distances(num_distances),
            wavelength: self.wavelength,
            aperture: self.aperture,
            mode: self.aperture_mode,
            regions,
            seed,
        }
    }

    pub fn solver_params(&self, sparsity: usize) -> SolverParams {
        SolverParams {
            sparsity,
            ..self.solver.clone()
        }
    }
}
