//! Experiment drivers behind the command-line tool.

mod config;
mod phase;
mod recon;
mod verify;

pub use config::{ExperimentConfig, Phantom};
pub use phase::{run_phase_diagram, trial_seeds, CellResult, PhaseDiagram};
pub use recon::{make_phantom, recon_ensemble, reconstruct_measurements, run_recon_experiment, simulate, ReconOutput, KIND_ESTIMATE};
pub use verify::{
    gradient_dense_gap, gradient_fd_gap, oracle_gaps, run_verify, CheckResult, CheckStatus, VerifyReport, FD_TOL, ORACLE_TOL,
};
