//! Coded apertures: diagonal modulations with `|d| <= 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridShape;
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ApertureKind {
    /// i.i.d. Bernoulli(1/2) entries on `{0, 1}`.
    BlockUnblock,
    /// i.i.d. `e^{j theta}`, theta uniform on `[0, 2 pi)`.
    UniformPhase,
    /// Caller-provided values.
    Custom,
}

impl ApertureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ApertureKind::BlockUnblock => "block-unblock",
            ApertureKind::UniformPhase => "uniform-phase",
            ApertureKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ApertureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ApertureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "block-unblock" => Ok(ApertureKind::BlockUnblock),
            "uniform-phase" => Ok(ApertureKind::UniformPhase),
            "custom" => Ok(ApertureKind::Custom),
            other => Err(Error::UnsupportedKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodedAperture {
    pub shape: GridShape,
    pub values: Vec<Complex64>,
    pub kind: ApertureKind,
}

impl CodedAperture {
    pub fn custom(shape: GridShape, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(Error::LengthMismatch {
                expected: shape.len(),
                got: values.len(),
            });
        }
        if let Some((index, d)) = values.iter().enumerate().find(|(_, d)| !(d.norm() <= 1.0)) {
            return Err(Error::ApertureModulus {
                index,
                modulus: d.norm(),
            });
        }
        Ok(Self {
            shape,
            values,
            kind: ApertureKind::Custom,
        })
    }

    /// The all-ones aperture.
    pub fn identity(shape: &GridShape) -> Self {
        Self {
            shape: shape.clone(),
            values: vec![Complex64::new(1.0, 0.0); shape.len()],
            kind: ApertureKind::Custom,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub fn gen_coded_aperture(shape: &GridShape, kind: ApertureKind, seed: u64) -> Result<CodedAperture> {
    let mut rng = rng_from_seed(seed);
    let n = shape.len();
    let values = match kind {
        ApertureKind::BlockUnblock => (0..n)
            .map(|_| {
                if rng.random_bool(0.5) {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::default()
                }
            })
            .collect(),
        ApertureKind::UniformPhase => (0..n)
            .map(|_| {
                let theta = rng.random::<f64>() * std::f64::consts::TAU;
                let d = Complex64::cis(theta);
                // keep |d| <= 1 exactly; cos/sin rounding can overshoot by an ulp
                if d.norm() > 1.0 {
                    d * (1.0 - f64::EPSILON)
                } else {
                    d
                }
            })
            .collect(),
        ApertureKind::Custom => {
            return Err(Error::UnsupportedKind(
                "custom apertures are constructed from explicit values".into(),
            ))
        }
    };
    Ok(CodedAperture {
        shape: shape.clone(),
        values,
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_unblock_is_balanced() {
        let shape = GridShape::line(1000).unwrap();
        let d = gen_coded_aperture(&shape, ApertureKind::BlockUnblock, 1).unwrap();
        assert!(d.values.iter().all(|v| *v == Complex64::new(0.0, 0.0) || *v == Complex64::new(1.0, 0.0)));
        let ones = d.values.iter().filter(|v| v.re == 1.0).count() as f64 / 1000.0;
        assert!((0.45..=0.55).contains(&ones), "fraction of ones {ones}");
    }

    #[test]
    fn uniform_phase_is_unit_modulus() {
        let shape = GridShape::line(64).unwrap();
        let d = gen_coded_aperture(&shape, ApertureKind::UniformPhase, 2).unwrap();
        for v in &d.values {
            assert!((v.norm() - 1.0).abs() <= 1e-15);
            assert!(v.norm() <= 1.0);
        }
    }

    #[test]
    fn custom_values() {
        let shape = GridShape::line(4).unwrap();
        let ok = CodedAperture::custom(shape.clone(), vec![Complex64::new(1.0, 0.0); 4]).unwrap();
        assert_eq!(ok.kind, ApertureKind::Custom);
        let bad = CodedAperture::custom(shape.clone(), vec![Complex64::new(1.5, 0.0); 4]);
        assert!(matches!(bad, Err(Error::ApertureModulus { index: 0, .. })));
        assert!(gen_coded_aperture(&shape, ApertureKind::Custom, 0).is_err());
        assert!("pinhole".parse::<ApertureKind>().is_err());
    }

    #[test]
    fn deterministic() {
        let shape = GridShape::line(32).unwrap();
        let a = gen_coded_aperture(&shape, ApertureKind::UniformPhase, 5).unwrap();
        let b = gen_coded_aperture(&shape, ApertureKind::UniformPhase, 5).unwrap();
        assert_eq!(a, b);
    }
}
