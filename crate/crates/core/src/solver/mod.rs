//! Sparse smoothed-amplitude phase retrieval.
//!
//! Two stages: a truncated spectral initializer restricted to an estimated
//! Fourier support, followed by Wirtinger gradient steps on the smoothed
//! amplitude objective, each projected onto `s`-sparse spectra.

mod init;
mod objective;
mod params;
mod reconstruct;
mod report;
mod threshold;

pub use init::{spectral_init, spectral_init_detailed, SpectralInit};
pub use objective::{gradient, objective, smoothing_phi};
pub use params::SolverParams;
pub use reconstruct::reconstruct;
pub use report::{ReconstructionReport, ReportSummary};
pub use threshold::{hard_threshold, select_support, support_scores, top_indices};
