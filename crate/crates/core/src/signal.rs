//! Fourier-sparse signals and synthetic crystal lattices.

use num_complex::Complex64;
use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{count_nonzeros, Fourier, GridShape};
use crate::rng::{complex_gaussian, rng_from_seed};

/// Relative tolerance used when counting nonzero Fourier coefficients.
pub const SPARSITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalSignal {
    pub shape: GridShape,
    /// Spatial-domain samples, row-major.
    pub values: Vec<Complex64>,
    /// Number of nonzero coefficients of the unitary DFT of `values`.
    pub sparsity: usize,
}

impl CrystalSignal {
    /// Wraps arbitrary values, measuring the Fourier sparsity.
    pub fn from_values(shape: GridShape, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::LengthMismatch {
                expected: shape.len(),
                got: values.len(),
            });
        }
        let spectrum = Fourier::new(&shape).forward_vec(&values);
        let sparsity = count_nonzeros(&spectrum, SPARSITY_TOL);
        Ok(Self {
            shape,
            values,
            sparsity,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn spectrum(&self) -> Vec<Complex64> {
        Fourier::new(&self.shape).forward_vec(&self.values)
    }

    pub fn norm(&self) -> f64 {
        crate::grid::norm2(&self.values)
    }
}

/// Draws `x = F^H x~` where `x~` has exactly `s` nonzero standard complex
/// Gaussian entries on a uniformly random support.
pub fn gen_sparse_signal(shape: &GridShape, s: usize, seed: u64) -> Result<CrystalSignal> {
    let n = shape.len();
    if s < 1 || s > n {
        return Err(Error::InvalidSparsity { s, n });
    }
    let mut rng = rng_from_seed(seed);
    let mut support = index::sample(&mut rng, n, s).into_vec();
    support.sort_unstable();
    let mut spectrum = vec![Complex64::default(); n];
    for &q in &support {
        // a Gaussian draw of exactly zero has probability zero; guard anyway so
        // the sparsity contract is unconditional
        let mut c = complex_gaussian(&mut rng);
        while c.norm() == 0.0 {
            c = complex_gaussian(&mut rng);
        }
        spectrum[q] = c;
    }
    let values = Fourier::new(shape).inverse_vec(&spectrum);
    Ok(CrystalSignal {
        shape: shape.clone(),
        values,
        sparsity: s,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lattice", rename_all = "kebab-case")]
pub enum Lattice {
    /// Two interleaved species on a cubic point lattice. Sites sit every
    /// `period / 2` samples along each axis; the species alternates with the
    /// parity of the site coordinates, so the pattern repeats every `period`.
    RockSalt { period: usize, amplitudes: [f64; 2] },
    /// A unit cell of shape `cell` tiled over the grid.
    CustomMotif { cell: Vec<usize>, motif: Vec<[f64; 2]> },
}

impl Default for Lattice {
    fn default() -> Self {
        // Cl and Na scattering weights taken proportional to atomic number
        Lattice::RockSalt {
            period: 16,
            amplitudes: [17.0, 11.0],
        }
    }
}

pub fn gen_crystal_lattice(shape: &GridShape, lattice: &Lattice) -> Result<CrystalSignal> {
    let n = shape.len();
    let values = match lattice {
        Lattice::RockSalt { period, amplitudes } => {
            let period = *period;
            let bad = period < 2
                || period % 2 != 0
                || shape.dims().iter().any(|&d| d % period != 0);
            if bad {
                return Err(Error::LatticePeriod {
                    period,
                    dims: shape.dims().to_vec(),
                });
            }
            let spacing = period / 2;
            (0..n)
                .map(|i| {
                    let coords = shape.unflatten(i);
                    if coords.iter().any(|c| c % spacing != 0) {
                        return Complex64::default();
                    }
                    let parity: usize = coords.iter().map(|c| c / spacing).sum::<usize>() % 2;
                    Complex64::new(amplitudes[parity], 0.0)
                })
                .collect()
        }
        Lattice::CustomMotif { cell, motif } => {
            let cell_shape = GridShape::new(cell.clone())?;
            if motif.len() != cell_shape.len() {
                return Err(Error::LengthMismatch {
                    expected: cell_shape.len(),
                    got: motif.len(),
                });
            }
            if cell.len() != shape.ndim()
                || cell.iter().zip(shape.dims()).any(|(&c, &d)| d % c != 0)
            {
                let period = cell.iter().copied().max().unwrap_or(0);
                return Err(Error::LatticePeriod {
                    period,
                    dims: shape.dims().to_vec(),
                });
            }
            (0..n)
                .map(|i| {
                    let local: Vec<usize> = shape
                        .unflatten(i)
                        .iter()
                        .zip(cell)
                        .map(|(c, p)| c % p)
                        .collect();
                    let [re, im] = motif[cell_shape.flatten(&local)];
                    Complex64::new(re, im)
                })
                .collect()
        }
    };
    CrystalSignal::from_values(shape.clone(), values)
}
