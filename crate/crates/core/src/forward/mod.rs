//! Coded-diffraction measurement model.
//!
//! For distance `p` and region `r` the complex field at the detector is
//! `F T(z_p) F^H D_p S_r F x`, and the recorded intensity is its squared
//! modulus. Measurements are flattened with the detector index `i` fastest,
//! then `p`, then `r`.

mod dense;
mod ensemble;
mod measurement;
mod noise;
mod operator;
mod transfer;

pub use dense::{explicit_matrix, DENSE_ENTRY_LIMIT};
pub use ensemble::{default_distances, ApertureMode, EnsembleSpec, SensingEnsemble};
pub use measurement::{MeasurementSet, NoiseInfo, FLATTENING};
pub use noise::{add_noise, noise_sigma};
pub use operator::{adjoint_field, field, forward, forward_values};
pub use transfer::{make_transfer_function, Kernel, TransferFunction};
