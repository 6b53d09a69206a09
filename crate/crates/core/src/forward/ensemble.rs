use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::transfer::{make_transfer_function, Kernel, TransferFunction};
use crate::aperture::{gen_coded_aperture, ApertureKind, CodedAperture};
use crate::error::{Error, Result};
use crate::grid::{Fourier, GridShape};
use crate::regions::{gen_regions, RegionPartition};
use crate::rng::derive_seed;

/// How coded apertures are assigned to sensing distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ApertureMode {
    /// An independent aperture realization for every distance.
    #[default]
    PerDistance,
    /// One aperture shared by all distances.
    Single,
}

impl fmt::Display for ApertureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ApertureMode::PerDistance => "per-distance",
            ApertureMode::Single => "single",
        })
    }
}

/// Immutable description of the sampling vectors `b^r_{p,i}`.
#[derive(Debug, Clone)]
pub struct SensingEnsemble {
    shape: GridShape,
    fourier: Fourier,
    transfers: Vec<TransferFunction>,
    apertures: Vec<CodedAperture>,
    mode: ApertureMode,
    regions: RegionPartition,
    gain: f64,
    id: String,
}

impl SensingEnsemble {
    pub fn new(
        transfers: Vec<TransferFunction>,
        apertures: Vec<CodedAperture>,
        mode: ApertureMode,
        regions: RegionPartition,
    ) -> Result<Self> {
        let shape = regions.shape.clone();
        if transfers.is_empty() {
            return Err(Error::Empty("sensing distances"));
        }
        let expected_apertures = match mode {
            ApertureMode::PerDistance => transfers.len(),
            ApertureMode::Single => 1,
        };
        if apertures.len() != expected_apertures {
            return Err(Error::LengthMismatch {
                expected: expected_apertures,
                got: apertures.len(),
            });
        }
        for t in &transfers {
            if t.shape != shape {
                return Err(Error::ShapeMismatch(t.shape.dims().to_vec(), shape.dims().to_vec()));
            }
        }
        for d in &apertures {
            if d.shape != shape {
                return Err(Error::ShapeMismatch(d.shape.dims().to_vec(), shape.dims().to_vec()));
            }
            if let Some((index, v)) = d.values.iter().enumerate().find(|(_, v)| !(v.norm() <= 1.0)) {
                return Err(Error::ApertureModulus {
                    index,
                    modulus: v.norm(),
                });
            }
        }
        let mut ensemble = Self {
            fourier: Fourier::new(&shape),
            shape,
            transfers,
            apertures,
            mode,
            regions,
            gain: 1.0,
            id: String::new(),
        };
        ensemble.id = ensemble.fingerprint();
        Ok(ensemble)
    }

    /// `P = 1`, `z = 0`, all-ones aperture, one region: every operator
    /// collapses to the unitary DFT.
    pub fn identity(shape: &GridShape) -> Self {
        Self::new(
            vec![TransferFunction::identity(shape)],
            vec![CodedAperture::identity(shape)],
            ApertureMode::Single,
            gen_regions(shape, 1).expect("one region always fits"),
        )
        .expect("identity ensemble is valid")
    }

    /// Same ensemble with every sampling vector multiplied by `gain`.
    pub fn with_gain(mut self, gain: f64) -> Self {
        self.gain = gain;
        self.id = self.fingerprint();
        self
    }

    /// Amplitude gain that makes `(1/m) B^H B` have unit mean eigenvalue,
    /// i.e. `(gain^2 / m) tr(B^H B) = n`.
    pub fn isotropic_gain(&self) -> f64 {
        let trace: f64 = (0..self.num_distances())
            .map(|p| self.aperture(p).values.iter().map(|d| d.norm_sqr()).sum::<f64>())
            .sum();
        if trace == 0.0 {
            return 1.0;
        }
        (self.m() as f64 * self.n() as f64 / trace).sqrt()
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn fourier(&self) -> &Fourier {
        &self.fourier
    }

    pub fn n(&self) -> usize {
        self.shape.len()
    }

    /// Number of sensing distances `P`.
    pub fn num_distances(&self) -> usize {
        self.transfers.len()
    }

    /// Number of regions `R`.
    pub fn num_regions(&self) -> usize {
        self.regions.count()
    }

    /// Total measurement count `m = n R P`.
    pub fn m(&self) -> usize {
        self.n() * self.num_distances() * self.num_regions()
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn mode(&self) -> ApertureMode {
        self.mode
    }

    pub fn distances(&self) -> Vec<f64> {
        self.transfers.iter().map(|t| t.distance).collect()
    }

    pub fn transfer(&self, p: usize) -> &TransferFunction {
        &self.transfers[p]
    }

    /// Aperture used at distance `p`.
    pub fn aperture(&self, p: usize) -> &CodedAperture {
        match self.mode {
            ApertureMode::PerDistance => &self.apertures[p],
            ApertureMode::Single => &self.apertures[0],
        }
    }

    pub fn apertures(&self) -> &[CodedAperture] {
        &self.apertures
    }

    pub fn regions(&self) -> &RegionPartition {
        &self.regions
    }

    /// Flat measurement index of `(i, p, r)`.
    pub fn index(&self, i: usize, p: usize, r: usize) -> usize {
        i + self.n() * (p + self.num_distances() * r)
    }

    /// Content hash identifying the ensemble.
    pub fn id(&self) -> &str {
        &self.id
    }

    /// `D_p S_r` as a diagonal, scaled by the gain.
    pub(crate) fn coded_selector(&self, p: usize, r: usize) -> Vec<Complex64> {
        let aperture = self.aperture(p);
        aperture
            .values
            .iter()
            .zip(self.regions.membership())
            .map(|(d, &region)| if region == r { d * self.gain } else { Complex64::default() })
            .collect()
    }

    fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for d in self.shape.dims() {
            hasher.update((*d as u64).to_le_bytes());
        }
        let mut push = |v: &Complex64| {
            hasher.update(v.re.to_bits().to_le_bytes());
            hasher.update(v.im.to_bits().to_le_bytes());
        };
        for t in &self.transfers {
            t.values.iter().for_each(&mut push);
        }
        for d in &self.apertures {
            d.values.iter().for_each(&mut push);
        }
        hasher.update([self.mode as u8]);
        for r in self.regions.membership() {
            hasher.update((*r as u64).to_le_bytes());
        }
        hasher.update(self.gain.to_bits().to_le_bytes());
        let digest = hasher.finalize();
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Evenly spaced distances `0, dz, 2 dz, ..` with `dz` equal to half the
/// largest grid extent.
pub fn default_distances(shape: &GridShape, count: usize) -> Vec<f64> {
    let step = *shape.dims().iter().max().expect("nonempty shape") as f64 / 2.0;
    (0..count).map(|p| p as f64 * step).collect()
}

/// Recipe for a randomly drawn Fresnel ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub shape: GridShape,
    pub distances: Vec<f64>,
    pub wavelength: f64,
    pub aperture: ApertureKind,
    pub mode: ApertureMode,
    pub regions: usize,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn new(shape: GridShape, num_distances: usize, aperture: ApertureKind, seed: u64) -> Self {
        Self {
            distances: default_distances(&shape, num_distances),
            shape,
            wavelength: 1.0,
            aperture,
            mode: ApertureMode::PerDistance,
            regions: 1,
            seed,
        }
    }

    pub fn build(&self) -> Result<SensingEnsemble> {
        let kernel = Kernel::Fresnel {
            wavelength: self.wavelength,
        };
        let transfers = self
            .distances
            .iter()
            .map(|&z| make_transfer_function(&self.shape, z, &kernel))
            .collect::<Result<Vec<_>>>()?;
        let count = match self.mode {
            ApertureMode::PerDistance => transfers.len(),
            ApertureMode::Single => 1,
        };
        let apertures = (0..count)
            .map(|p| gen_coded_aperture(&self.shape, self.aperture, derive_seed(self.seed, 1, p as u64)))
            .collect::<Result<Vec<_>>>()?;
        let regions = gen_regions(&self.shape, self.regions)?;
        SensingEnsemble::new(transfers, apertures, self.mode, regions)
    }
}
