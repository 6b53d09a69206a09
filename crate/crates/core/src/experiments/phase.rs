use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::error::Result;
use crate::forward::{add_noise, forward};
use crate::metrics::{relative_error, success_rate, TrialOutcome};
use crate::rng::derive_seed;
use crate::signal::gen_sparse_signal;
use crate::solver::reconstruct;

/// One `(s, P, R)` cell of the diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub sparsity: usize,
    pub num_distances: usize,
    pub num_regions: usize,
    pub outcomes: Vec<TrialOutcome>,
    pub success_rate: f64,
    pub mean_rel_error: f64,
    pub mean_runtime_s: Option<f64>,
}

impl CellResult {
    pub fn m_over_n(&self) -> usize {
        self.num_distances * self.num_regions
    }

    pub fn successes(&self) -> usize {
        self.outcomes.iter().filter(|o| o.success).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDiagram {
    pub sparsity: Vec<usize>,
    /// `(P, R)` column pairs, in config order.
    pub columns: Vec<(usize, usize)>,
    /// Row-major over (sparsity, column).
    pub cells: Vec<CellResult>,
    pub config_hash: String,
    pub seed: u64,
}

/// Seeds of trial `trial` in cell `cell`: signal, ensemble, noise.
pub fn trial_seeds(master: u64, cell: usize, trial: usize) -> (u64, u64, u64) {
    let base = derive_seed(master, cell as u64, trial as u64);
    (derive_seed(base, 0, 0), derive_seed(base, 1, 0), derive_seed(base, 2, 0))
}

struct Job {
    cell: usize,
    trial: usize,
    sparsity: usize,
    p: usize,
    r: usize,
}

pub fn run_phase_diagram(config: &ExperimentConfig) -> Result<PhaseDiagram> {
    config.validate()?;
    let columns: Vec<(usize, usize)> = config
        .r_values
        .iter()
        .flat_map(|&r| config.p_values.iter().map(move |&p| (p, r)))
        .collect();
    let mut jobs = Vec::new();
    for (si, &s) in config.sparsity.iter().enumerate() {
        for (ci, &(p, r)) in columns.iter().enumerate() {
            let cell = si * columns.len() + ci;
            for trial in 0..config.trials {
                jobs.push(Job { cell, trial, sparsity: s, p, r });
            }
        }
    }
    let config_hash = config.hash();
    let results = jobs
        .par_iter()
        .map(|job| run_trial(config, job, &config_hash))
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::new();
    for (job_chunk, result_chunk) in jobs.chunks(config.trials).zip(results.chunks(config.trials)) {
        let first = &job_chunk[0];
        let outcomes: Vec<TrialOutcome> = result_chunk.iter().map(|(o, _)| o.clone()).collect();
        let count = outcomes.len() as f64;
        let mean_runtime_s = if config.record_timing {
            Some(result_chunk.iter().map(|(_, t)| t).sum::<f64>() / count)
        } else {
            None
        };
        cells.push(CellResult {
            sparsity: first.sparsity,
            num_distances: first.p,
            num_regions: first.r,
            success_rate: success_rate(&outcomes)?,
            mean_rel_error: outcomes.iter().map(|o| o.rel_error).sum::<f64>() / count,
            mean_runtime_s,
            outcomes,
        });
    }
    Ok(PhaseDiagram {
        sparsity: config.sparsity.clone(),
        columns,
        cells,
        config_hash,
        seed: config.seed,
    })
}

fn run_trial(config: &ExperimentConfig, job: &Job, config_hash: &str) -> Result<(TrialOutcome, f64)> {
    let (signal_seed, ensemble_seed, noise_seed) = trial_seeds(config.seed, job.cell, job.trial);
    let x = gen_sparse_signal(&config.shape, job.sparsity, signal_seed)?;
    let ens = config.ensemble_spec(job.p, job.r, ensemble_seed).build()?;
    let mut g = forward(&x, &ens)?;
    if let Some(snr) = config.snr_db {
        g = add_noise(&g, snr, noise_seed);
    }
    let params = config.solver_params(job.sparsity);
    let start = Instant::now();
    let report = reconstruct(&g, &ens, &params, None)?;
    let elapsed = start.elapsed().as_secs_f64();
    let err = relative_error(&report.estimate, &x.values)?;
    let id = format!("{config_hash}/s{}-P{}-R{}", job.sparsity, job.p, job.r);
    Ok((TrialOutcome::new(err, config.success_threshold, signal_seed, id), elapsed))
}

impl PhaseDiagram {
    pub fn cell(&self, sparsity: usize, p: usize, r: usize) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.sparsity == sparsity && c.num_distances == p && c.num_regions == r)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,m_over_n,P,R,trials,successes,success_rate,mean_rel_error,mean_runtime_s\n");
        for c in &self.cells {
            let runtime = c.mean_runtime_s.map(|t| format!("{t:.6}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:e},{}",
                c.sparsity,
                c.m_over_n(),
                c.num_distances,
                c.num_regions,
                c.outcomes.len(),
                c.successes(),
                c.success_rate,
                c.mean_rel_error,
                runtime
            );
        }
        out
    }

    /// Per-trial rows, sorted by cell then trial.
    pub fn trials_csv(&self) -> String {
        let mut out = String::from("config_id,trial,seed,rel_error,success\n");
        for c in &self.cells {
            for (t, o) in c.outcomes.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{:e},{}", o.config_id, t, o.seed, o.rel_error, o.success);
            }
        }
        out
    }

    /// Success-rate matrix: rows are sparsity levels, columns `m / n`.
    pub fn to_matrix(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# success rate, rows: s, columns: m/n");
        let _ = writeln!(out, "# config_hash = {}", self.config_hash);
        let _ = writeln!(out, "# seed = {}", self.seed);
        let cols: Vec<String> = self.columns.iter().map(|(p, r)| (p * r).to_string()).collect();
        let _ = writeln!(out, "# m_over_n = {}", cols.join(" "));
        let rows: Vec<String> = self.sparsity.iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "# s = {}", rows.join(" "));
        for chunk in self.cells.chunks(self.columns.len()) {
            let line: Vec<String> = chunk.iter().map(|c| format!("{:.4}", c.success_rate)).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    /// Cells whose success rate drops as `m / n` grows at fixed `s`.
    pub fn monotonicity_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        for chunk in self.cells.chunks(self.columns.len()) {
            let mut sorted: Vec<&CellResult> = chunk.iter().collect();
            sorted.sort_by_key(|c| c.m_over_n());
            for w in sorted.windows(2) {
                if w[1].m_over_n() > w[0].m_over_n() && w[1].success_rate < w[0].success_rate {
                    warnings.push(format!(
                        "s = {}: success rate falls from {} at m/n = {} to {} at m/n = {}",
                        w[0].sparsity,
                        w[0].success_rate,
                        w[0].m_over_n(),
                        w[1].success_rate,
                        w[1].m_over_n()
                    ));
                }
            }
        }
        warnings
    }

    /// Writes `phase_diagram.csv`, `phase_diagram_trials.csv` and `phase_diagram.dat`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let files = [
            ("phase_diagram.csv", self.to_csv()),
            ("phase_diagram_trials.csv", self.trials_csv()),
            ("phase_diagram.dat", self.to_matrix()),
        ];
        let mut written = Vec::new();
        for (name, body) in files {
            let path = dir.join(name);
            fs::write(&path, body)?;
            written.push(path);
        }
        Ok(written)
    }
}
