use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, Phantom};
use crate::error::{Error, Result};
use crate::forward::{add_noise, forward, MeasurementSet, SensingEnsemble};
use crate::rng::derive_seed;
use crate::signal::{gen_crystal_lattice, gen_sparse_signal, CrystalSignal};
use crate::solver::{reconstruct, ReconstructionReport, ReportSummary, SolverParams};
use crate::textio::{VectorFile, KIND_SIGNAL};

pub const KIND_ESTIMATE: &str = "estimate";

pub fn make_phantom(config: &ExperimentConfig) -> Result<CrystalSignal> {
    match &config.phantom {
        Phantom::Lattice { lattice } => gen_crystal_lattice(&config.shape, lattice),
        Phantom::Random { sparsity } => gen_sparse_signal(&config.shape, *sparsity, derive_seed(config.seed, 4, 0)),
    }
}

/// Ensemble of the single-run experiments, fully determined by the config.
pub fn recon_ensemble(config: &ExperimentConfig) -> Result<SensingEnsemble> {
    config
        .ensemble_spec(config.recon_p, config.r_values[0], derive_seed(config.seed, 2, 0))
        .build()
}

/// Noiseless intensities of `phantom`, with noise added when the config sets
/// an SNR.
pub fn simulate(config: &ExperimentConfig, phantom: &CrystalSignal, ens: &SensingEnsemble) -> Result<MeasurementSet> {
    let g = forward(phantom, ens)?;
    Ok(match config.snr_db {
        Some(snr) => add_noise(&g, snr, derive_seed(config.seed, 3, 0)),
        None => g,
    })
}

#[derive(Debug, Clone)]
pub struct ReconOutput {
    pub phantom: Option<CrystalSignal>,
    pub measurements: MeasurementSet,
    pub params: SolverParams,
    pub report: ReconstructionReport,
    pub config_hash: String,
}

#[derive(Serialize)]
struct ReportDocument<'a> {
    config_hash: &'a str,
    ensemble_id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    snr_db: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise_sigma: Option<f64>,
    params: &'a SolverParams,
    summary: ReportSummary,
}

impl ReconOutput {
    pub fn rel_error(&self) -> Option<f64> {
        self.report.final_error()
    }

    pub fn report_toml(&self) -> Result<String> {
        let doc = ReportDocument {
            config_hash: &self.config_hash,
            ensemble_id: &self.measurements.ensemble_id,
            snr_db: self.measurements.noise.map(|n| n.snr_db),
            noise_sigma: self.measurements.noise.map(|n| n.sigma),
            params: &self.params,
            summary: self.report.summary(),
        };
        toml::to_string(&doc).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn estimate_file(&self) -> Result<VectorFile> {
        let signal = CrystalSignal::from_values(
            crate::grid::GridShape::new(self.measurements.shape.clone())?,
            self.report.estimate.clone(),
        )?;
        Ok(VectorFile::from_signal(&signal, KIND_ESTIMATE, None))
    }

    /// Writes the report, per-iteration trace, estimate, and (when known) the
    /// phantom and measurements.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let mut put = |name: &str, body: String| -> Result<()> {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
            Ok(())
        };
        put("report.toml", self.report_toml()?)?;
        put("trace.csv", self.report.trace_csv())?;
        put("estimate.txt", self.estimate_file()?.to_text()?)?;
        put("measurements.txt", self.measurements.to_text()?)?;
        if let Some(x) = &self.phantom {
            put("phantom.txt", VectorFile::from_signal(x, KIND_SIGNAL, None).to_text()?)?;
        }
        Ok(written)
    }
}

/// Reconstructs `g` with the config's ensemble. `sparsity` defaults to the
/// phantom's when one is given.
pub fn reconstruct_measurements(
    config: &ExperimentConfig,
    g: MeasurementSet,
    phantom: Option<CrystalSignal>,
    sparsity: Option<usize>,
) -> Result<ReconOutput> {
    config.validate()?;
    let ens = recon_ensemble(config)?;
    g.check_ensemble(&ens)?;
    let s = match (sparsity, &phantom) {
        (Some(s), _) => s,
        (None, Some(x)) => x.sparsity,
        (None, None) => config.sparsity[0],
    };
    if let Some(x) = &phantom {
        if x.shape != config.shape {
            return Err(Error::ShapeMismatch(x.shape.dims().to_vec(), config.shape.dims().to_vec()));
        }
    }
    let params = config.solver_params(s);
    let report = reconstruct(&g, &ens, &params, phantom.as_ref().map(|x| x.values.as_slice()))?;
    Ok(ReconOutput {
        phantom,
        measurements: g,
        params,
        report,
        config_hash: config.hash(),
    })
}

/// Phantom, simulated measurements and reconstruction in one go.
pub fn run_recon_experiment(config: &ExperimentConfig) -> Result<ReconOutput> {
    config.validate()?;
    let phantom = make_phantom(config)?;
    let ens = recon_ensemble(config)?;
    let g = simulate(config, &phantom, &ens)?;
    reconstruct_measurements(config, g, Some(phantom), None)
}
