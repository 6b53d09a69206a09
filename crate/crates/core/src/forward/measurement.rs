use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ensemble::SensingEnsemble;
use crate::error::{Error, Result};
use crate::textio;

pub const FLATTENING: &str = "i,p,r";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseInfo {
    pub snr_db: f64,
    pub sigma: f64,
    pub seed: u64,
}

/// Nonnegative intensities `g^i_{p,r}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub ensemble_id: String,
    pub shape: Vec<usize>,
    pub num_distances: usize,
    pub num_regions: usize,
    pub distances: Vec<f64>,
    pub values: Vec<f64>,
    pub noise: Option<NoiseInfo>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    shape: Vec<usize>,
    #[serde(rename = "R")]
    regions: usize,
    #[serde(rename = "P")]
    distances_count: usize,
    distances: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    snr_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    flattening: String,
    ensemble_id: String,
}

impl MeasurementSet {
    pub fn new(ens: &SensingEnsemble, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), ens.m(), "measurement count must equal n R P");
        Self {
            ensemble_id: ens.id().to_string(),
            shape: ens.shape().dims().to_vec(),
            num_distances: ens.num_distances(),
            num_regions: ens.num_regions(),
            distances: ens.distances(),
            values,
            noise: None,
        }
    }

    pub fn n(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn index(&self, i: usize, p: usize, r: usize) -> usize {
        i + self.n() * (p + self.num_distances * r)
    }

    /// Inverse of [`MeasurementSet::index`].
    pub fn unflatten(&self, k: usize) -> (usize, usize, usize) {
        let n = self.n();
        let i = k % n;
        let rest = k / n;
        (i, rest % self.num_distances, rest / self.num_distances)
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Checks that the measurements were produced by (an ensemble identical to) `ens`.
    pub fn check_ensemble(&self, ens: &SensingEnsemble) -> Result<()> {
        if self.values.len() != ens.m() {
            return Err(Error::LengthMismatch {
                expected: ens.m(),
                got: self.values.len(),
            });
        }
        if self.shape != ens.shape().dims() {
            return Err(Error::ShapeMismatch(self.shape.clone(), ens.shape().dims().to_vec()));
        }
        if self.ensemble_id != ens.id() {
            return Err(Error::EnsembleMismatch {
                expected: ens.id().to_string(),
                got: self.ensemble_id.clone(),
            });
        }
        Ok(())
    }

    pub fn to_text(&self) -> Result<String> {
        let header = Header {
            shape: self.shape.clone(),
            regions: self.num_regions,
            distances_count: self.num_distances,
            distances: self.distances.clone(),
            snr_db: self.noise.map(|n| n.snr_db),
            sigma: self.noise.map(|n| n.sigma),
            seed: self.noise.map(|n| n.seed),
            flattening: FLATTENING.to_string(),
            ensemble_id: self.ensemble_id.clone(),
        };
        textio::render(&header, self.values.iter().map(|v| format!("{v:e}")))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (header, rows): (Header, Vec<String>) = textio::parse(text)?;
        if header.flattening != FLATTENING {
            return Err(Error::Parse(format!("unsupported flattening {:?}", header.flattening)));
        }
        let n: usize = header.shape.iter().product();
        let m = n * header.regions * header.distances_count;
        if rows.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: rows.len(),
            });
        }
        let values = rows.iter().map(|r| textio::parse_f64(r)).collect::<Result<Vec<_>>>()?;
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeIntensity { index, value });
        }
        let noise = match (header.snr_db, header.sigma, header.seed) {
            (Some(snr_db), Some(sigma), Some(seed)) => Some(NoiseInfo { snr_db, sigma, seed }),
            (None, None, None) => None,
            _ => return Err(Error::Parse("incomplete noise metadata".into())),
        };
        Ok(Self {
            ensemble_id: header.ensemble_id,
            shape: header.shape,
            num_distances: header.distances_count,
            num_regions: header.regions,
            distances: header.distances,
            values,
            noise,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}
