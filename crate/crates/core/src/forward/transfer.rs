use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridShape;

/// Allowed deviation of `|T_k|` from one.
const UNIT_TOL: f64 = 1e-12;

type Response = dyn Fn(&[f64], f64) -> Complex64 + Send + Sync;

/// Free-space propagation model in the spatial-frequency domain.
#[derive(Clone)]
pub enum Kernel {
    /// `exp(-j pi lambda z |nu|^2)` with `nu` in cycles per sample.
    Fresnel { wavelength: f64 },
    /// Response `(nu, z) -> T`; must have unit modulus everywhere.
    Custom(Arc<Response>),
}

impl fmt::Debug for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Fresnel { wavelength } => f.debug_struct("Fresnel").field("wavelength", wavelength).finish(),
            Kernel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// Diagonal of `T(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    pub shape: GridShape,
    pub distance: f64,
    pub values: Vec<Complex64>,
}

impl TransferFunction {
    pub fn identity(shape: &GridShape) -> Self {
        Self {
            shape: shape.clone(),
            distance: 0.0,
            values: vec![Complex64::new(1.0, 0.0); shape.len()],
        }
    }

    pub fn from_values(shape: GridShape, distance: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::LengthMismatch {
                expected: shape.len(),
                got: values.len(),
            });
        }
        if let Some((index, t)) = values
            .iter()
            .enumerate()
            .find(|(_, t)| !((t.norm() - 1.0).abs() <= UNIT_TOL))
        {
            return Err(Error::NonUnitaryKernel {
                index,
                modulus: t.norm(),
            });
        }
        Ok(Self {
            shape,
            distance,
            values,
        })
    }
}

pub fn make_transfer_function(shape: &GridShape, z: f64, kernel: &Kernel) -> Result<TransferFunction> {
    let n = shape.len();
    let values = match kernel {
        Kernel::Fresnel { wavelength } => {
            if !(*wavelength > 0.0) {
                return Err(Error::InvalidWavelength(*wavelength));
            }
            if z == 0.0 {
                vec![Complex64::new(1.0, 0.0); n]
            } else {
                (0..n)
                    .map(|k| {
                        let nu2: f64 = shape.frequency(k).iter().map(|f| f * f).sum();
                        Complex64::cis(-std::f64::consts::PI * wavelength * z * nu2)
                    })
                    .collect()
            }
        }
        Kernel::Custom(response) => (0..n).map(|k| response(&shape.frequency(k), z)).collect(),
    };
    TransferFunction::from_values(shape.clone(), z, values)
}
