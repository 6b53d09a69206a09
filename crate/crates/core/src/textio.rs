//! Structured-text files for grid vectors.
//!
//! A file is a TOML document: scalar header keys followed by a multi-line
//! `data` string holding one `index, re, im` row per grid point, e.g.
//!
//! ```text
//! shape = [4]
//! kind = "sparse-signal"
//! seed = 7
//! sparsity = 2
//! data = """
//! 0, 5e-1, 0e0
//! ...
//! """
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::aperture::{ApertureKind, CodedAperture};
use crate::error::{Error, Result};
use crate::grid::GridShape;
use crate::regions::RegionPartition;
use crate::signal::CrystalSignal;

pub const KIND_SIGNAL: &str = "crystal-signal";
pub const KIND_PARTITION: &str = "region-partition";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorHeader {
    pub shape: Vec<usize>,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<usize>,
}

#[derive(Deserialize)]
struct Document<H> {
    #[serde(flatten)]
    header: H,
    data: String,
}

/// Renders `header` followed by the `data` block.
pub(crate) fn render<H: Serialize>(header: &H, rows: impl Iterator<Item = String>) -> Result<String> {
    let mut out = toml::to_string(header).map_err(|e| Error::Parse(e.to_string()))?;
    out.push_str("data = \"\"\"\n");
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out.push_str("\"\"\"\n");
    Ok(out)
}

/// Splits a document into its header and the non-empty data lines.
pub(crate) fn parse<H: for<'de> Deserialize<'de>>(text: &str) -> Result<(H, Vec<String>)> {
    let doc: Document<H> = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let rows = doc
        .data
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect();
    Ok((doc.header, rows))
}

pub(crate) fn parse_f64(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number {field:?}")))
}

fn complex_rows(values: &[Complex64]) -> impl Iterator<Item = String> + '_ {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{i}, {:e}, {:e}", v.re, v.im))
}

fn parse_complex_rows(rows: &[String], n: usize) -> Result<Vec<Complex64>> {
    if rows.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: rows.len(),
        });
    }
    let mut values = vec![Complex64::default(); n];
    let mut seen = vec![false; n];
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("expected `index, re, im`, got {row:?}")));
        }
        let index: usize = fields[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad index in {row:?}")))?;
        if index >= n || seen[index] {
            return Err(Error::Parse(format!("index {index} out of range or repeated")));
        }
        seen[index] = true;
        values[index] = Complex64::new(parse_f64(fields[1])?, parse_f64(fields[2])?);
    }
    Ok(values)
}

/// A serialized grid vector with its header.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFile {
    pub header: VectorHeader,
    pub values: Vec<Complex64>,
}

impl VectorFile {
    pub fn from_signal(signal: &CrystalSignal, kind: &str, seed: Option<u64>) -> Self {
        Self {
            header: VectorHeader {
                shape: signal.shape.dims().to_vec(),
                kind: kind.to_string(),
                seed,
                sparsity: Some(signal.sparsity),
                regions: None,
            },
            values: signal.values.clone(),
        }
    }

    pub fn from_aperture(aperture: &CodedAperture, seed: Option<u64>) -> Self {
        Self {
            header: VectorHeader {
                shape: aperture.shape.dims().to_vec(),
                kind: aperture.kind.to_string(),
                seed,
                sparsity: None,
                regions: None,
            },
            values: aperture.values.clone(),
        }
    }

    /// Region ids go in the real column.
    pub fn from_partition(partition: &RegionPartition) -> Self {
        Self {
            header: VectorHeader {
                shape: partition.shape.dims().to_vec(),
                kind: KIND_PARTITION.to_string(),
                seed: None,
                sparsity: None,
                regions: Some(partition.count()),
            },
            values: partition
                .membership()
                .iter()
                .map(|&r| Complex64::new(r as f64, 0.0))
                .collect(),
        }
    }

    pub fn to_text(&self) -> Result<String> {
        render(&self.header, complex_rows(&self.values))
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (header, rows): (VectorHeader, _) = parse(text)?;
        let shape = GridShape::new(header.shape.clone())?;
        let values = parse_complex_rows(&rows, shape.len())?;
        Ok(Self { header, values })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path)?)
    }

    pub fn shape(&self) -> Result<GridShape> {
        GridShape::new(self.header.shape.clone())
    }

    pub fn into_signal(self) -> Result<CrystalSignal> {
        let shape = self.shape()?;
        let mut signal = CrystalSignal::from_values(shape, self.values)?;
        if let Some(s) = self.header.sparsity {
            if s != signal.sparsity {
                return Err(Error::Parse(format!(
                    "header sparsity {s} disagrees with measured {}",
                    signal.sparsity
                )));
            }
            signal.sparsity = s;
        }
        Ok(signal)
    }

    pub fn into_aperture(self) -> Result<CodedAperture> {
        let shape = self.shape()?;
        let kind: ApertureKind = self.header.kind.parse()?;
        let mut aperture = CodedAperture::custom(shape, self.values)?;
        aperture.kind = kind;
        Ok(aperture)
    }

    pub fn into_partition(self) -> Result<RegionPartition> {
        let shape = self.shape()?;
        let count = self
            .header
            .regions
            .ok_or_else(|| Error::Parse("missing `regions`".into()))?;
        let membership = self
            .values
            .iter()
            .map(|v| {
                if v.im != 0.0 || v.re < 0.0 || v.re.fract() != 0.0 {
                    Err(Error::Parse(format!("bad region id {v}")))
                } else {
                    Ok(v.re as usize)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        RegionPartition::from_membership(shape, count, membership)
    }
}
