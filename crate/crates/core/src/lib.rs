//! Coded diffraction pattern simulation and sparse phase retrieval.
//!
//! The crate models intensity measurements of a Fourier-sparse signal taken
//! through coded apertures at several propagation distances, reconstructs the
//! signal with a thresholded smoothed-amplitude Wirtinger scheme, and provides
//! numerical checks of the operator identities behind exact recovery.

pub mod aperture;
pub mod error;
pub mod experiments;
pub mod forward;
pub mod grid;
pub mod guarantees;
pub mod metrics;
pub mod regions;
pub mod rng;
pub mod signal;
pub mod solver;
pub mod textio;

pub use aperture::{gen_coded_aperture, ApertureKind, CodedAperture};
pub use error::{Error, Result};
pub use grid::{Fourier, GridShape};
pub use regions::{gen_regions, RegionPartition};
pub use signal::{gen_crystal_lattice, gen_sparse_signal, CrystalSignal, Lattice};
