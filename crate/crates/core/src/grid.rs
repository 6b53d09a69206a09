//! Grid geometry and the unitary d-dimensional DFT.
//!
//! Points are flattened row-major: the last axis varies fastest. The DFT is
//! normalized so that `F^H F = F F^H = I`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct GridShape {
    dims: Vec<usize>,
}

impl GridShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("no axes".into()));
        }
        if let Some(axis) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidShape(format!("axis {axis} has extent 0")));
        }
        dims.iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidShape("point count overflows".into()))?;
        Ok(Self { dims })
    }

    pub fn line(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for axis in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * self.dims[axis + 1];
        }
        strides
    }

    pub fn unflatten(&self, mut index: usize) -> Vec<usize> {
        let mut coords = vec![0; self.dims.len()];
        for axis in (0..self.dims.len()).rev() {
            coords[axis] = index % self.dims[axis];
            index /= self.dims[axis];
        }
        coords
    }

    pub fn flatten(&self, coords: &[usize]) -> usize {
        coords
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&c, &d)| acc * d + c % d)
    }

    /// Frequency vector of a flat index in cycles per sample, in FFT order
    /// (`0, 1/L, .., -1/L` along each axis).
    pub fn frequency(&self, index: usize) -> Vec<f64> {
        self.unflatten(index)
            .into_iter()
            .zip(&self.dims)
            .map(|(k, &len)| {
                let k = k as f64;
                let len_f = len as f64;
                if 2 * (k as usize) < len {
                    k / len_f
                } else {
                    (k - len_f) / len_f
                }
            })
            .collect()
    }

    /// Flat index of `-k` (componentwise modulo the dims).
    pub fn negate_index(&self, index: usize) -> usize {
        let coords: Vec<usize> = self
            .unflatten(index)
            .into_iter()
            .zip(&self.dims)
            .map(|(c, &d)| (d - c) % d)
            .collect();
        self.flatten(&coords)
    }

    /// Flat index of `a - b` modulo the dims.
    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        let ca = self.unflatten(a);
        let cb = self.unflatten(b);
        let coords: Vec<usize> = ca
            .iter()
            .zip(&cb)
            .zip(&self.dims)
            .map(|((&x, &y), &d)| (x + d - y) % d)
            .collect();
        self.flatten(&coords)
    }
}

impl TryFrom<Vec<usize>> for GridShape {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Self::new(dims)
    }
}

impl From<GridShape> for Vec<usize> {
    fn from(shape: GridShape) -> Self {
        shape.dims
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

struct AxisPlan {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Planned unitary DFT over a [`GridShape`]. Cheap to clone and safe to share
/// across threads.
#[derive(Clone)]
pub struct Fourier {
    shape: GridShape,
    axes: Arc<Vec<AxisPlan>>,
}

impl fmt::Debug for Fourier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fourier").field("shape", &self.shape).finish()
    }
}

impl Fourier {
    pub fn new(shape: &GridShape) -> Self {
        let mut planner = FftPlanner::new();
        let axes = shape
            .dims()
            .iter()
            .map(|&len| AxisPlan {
                len,
                forward: planner.plan_fft_forward(len),
                inverse: planner.plan_fft_inverse(len),
            })
            .collect();
        Self {
            shape: shape.clone(),
            axes: Arc::new(axes),
        }
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    /// In-place `x <- F x`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.apply(data, true);
    }

    /// In-place `x <- F^H x`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.apply(data, false);
    }

    pub fn forward_vec(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut out = data.to_vec();
        self.forward(&mut out);
        out
    }

    pub fn inverse_vec(&self, data: &[Complex64]) -> Vec<Complex64> {
        let mut out = data.to_vec();
        self.inverse(&mut out);
        out
    }

    fn apply(&self, data: &mut [Complex64], forward: bool) {
        let n = self.shape.len();
        assert_eq!(data.len(), n, "buffer length does not match grid");
        let strides = self.shape.strides();
        let ndim = self.axes.len();
        for (axis, plan) in self.axes.iter().enumerate() {
            if plan.len == 1 {
                continue;
            }
            let fft = if forward { &plan.forward } else { &plan.inverse };
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            if axis + 1 == ndim {
                // contiguous lines; rustfft handles back-to-back transforms
                fft.process_with_scratch(data, &mut scratch);
            } else {
                let stride = strides[axis];
                let block = stride * plan.len;
                let mut line = vec![Complex64::default(); plan.len];
                for base in (0..n).step_by(block) {
                    for offset in 0..stride {
                        let start = base + offset;
                        for (k, v) in line.iter_mut().enumerate() {
                            *v = data[start + k * stride];
                        }
                        fft.process_with_scratch(&mut line, &mut scratch);
                        for (k, v) in line.iter().enumerate() {
                            data[start + k * stride] = *v;
                        }
                    }
                }
            }
        }
        let scale = 1.0 / (n as f64).sqrt();
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// Dense unitary DFT matrix built from its defining formula (Kronecker product
/// over axes). Used by the explicit-matrix oracle; independent of the FFT path.
pub fn dense_dft_matrix(shape: &GridShape) -> nalgebra::DMatrix<Complex64> {
    let n = shape.len();
    let coords: Vec<Vec<usize>> = (0..n).map(|i| shape.unflatten(i)).collect();
    let scale = 1.0 / (n as f64).sqrt();
    nalgebra::DMatrix::from_fn(n, n, |row, col| {
        let phase: f64 = coords[row]
            .iter()
            .zip(&coords[col])
            .zip(shape.dims())
            .map(|((&a, &b), &len)| ((a * b) % len) as f64 / len as f64)
            .sum();
        Complex64::from_polar(scale, -2.0 * std::f64::consts::PI * phase)
    })
}

pub(crate) fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `a^H b`.
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Number of entries with modulus above `rel_tol * max modulus`.
pub fn count_nonzeros(v: &[Complex64], rel_tol: f64) -> usize {
    let max = v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    v.iter().filter(|c| c.norm() > rel_tol * max).count()
}
