use num_complex::Complex64;

use super::ensemble::SensingEnsemble;
use super::measurement::MeasurementSet;
use crate::error::{Error, Result};
use crate::signal::CrystalSignal;

/// All inner products `(b^r_{p,i})^H x`, flattened `i` fastest, then `p`,
/// then `r`.
pub fn field(x: &[Complex64], ens: &SensingEnsemble) -> Result<Vec<Complex64>> {
    let n = ens.n();
    if x.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let fourier = ens.fourier();
    let spectrum = fourier.forward_vec(x);
    let mut out = vec![Complex64::default(); ens.m()];
    for r in 0..ens.num_regions() {
        for p in 0..ens.num_distances() {
            let start = ens.index(0, p, r);
            let slice = &mut out[start..start + n];
            let coded = ens.coded_selector(p, r);
            for ((o, s), c) in slice.iter_mut().zip(&spectrum).zip(&coded) {
                *o = s * c;
            }
            fourier.inverse(slice);
            for (o, t) in slice.iter_mut().zip(&ens.transfer(p).values) {
                *o *= t;
            }
            fourier.forward(slice);
        }
    }
    Ok(out)
}

/// `sum_k v_k b_k`, the adjoint of [`field`].
pub fn adjoint_field(v: &[Complex64], ens: &SensingEnsemble) -> Result<Vec<Complex64>> {
    let n = ens.n();
    if v.len() != ens.m() {
        return Err(Error::LengthMismatch {
            expected: ens.m(),
            got: v.len(),
        });
    }
    let fourier = ens.fourier();
    let mut acc = vec![Complex64::default(); n];
    let mut buf = vec![Complex64::default(); n];
    for r in 0..ens.num_regions() {
        for p in 0..ens.num_distances() {
            let start = ens.index(0, p, r);
            buf.copy_from_slice(&v[start..start + n]);
            fourier.inverse(&mut buf);
            for (b, t) in buf.iter_mut().zip(&ens.transfer(p).values) {
                *b *= t.conj();
            }
            fourier.forward(&mut buf);
            let coded = ens.coded_selector(p, r);
            for ((a, b), c) in acc.iter_mut().zip(&buf).zip(&coded) {
                *a += b * c.conj();
            }
        }
    }
    fourier.inverse(&mut acc);
    Ok(acc)
}

/// Intensities `|field|^2` for raw values.
pub fn forward_values(x: &[Complex64], ens: &SensingEnsemble) -> Result<MeasurementSet> {
    let values = field(x, ens)?.iter().map(|c| c.norm_sqr()).collect();
    Ok(MeasurementSet::new(ens, values))
}

pub fn forward(x: &CrystalSignal, ens: &SensingEnsemble) -> Result<MeasurementSet> {
    if &x.shape != ens.shape() {
        return Err(Error::ShapeMismatch(x.shape.dims().to_vec(), ens.shape().dims().to_vec()));
    }
    forward_values(&x.values, ens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aperture::ApertureKind;
    use crate::forward::EnsembleSpec;
    use crate::grid::{inner, GridShape};
    use crate::rng::{complex_gaussian, rng_from_seed};
    use crate::signal::gen_sparse_signal;

    fn random(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = rng_from_seed(seed);
        (0..n).map(|_| complex_gaussian(&mut rng)).collect()
    }

    fn ensemble(n: usize, p: usize, r: usize, seed: u64) -> SensingEnsemble {
        let mut spec = EnsembleSpec::new(GridShape::line(n).unwrap(), p, ApertureKind::UniformPhase, seed);
        spec.regions = r;
        spec.build().unwrap()
    }

    #[test]
    fn identity_ensemble_is_dft() {
        let shape = GridShape::line(8).unwrap();
        let ens = SensingEnsemble::identity(&shape);
        let x = random(8, 1);
        let f = field(&x, &ens).unwrap();
        let expected = ens.fourier().forward_vec(&x);
        for (a, b) in f.iter().zip(&expected) {
            assert!((a - b).norm() < 1e-14);
        }
        let g = forward_values(&x, &ens).unwrap();
        for (gi, e) in g.values.iter().zip(&expected) {
            assert!((gi - e.norm_sqr()).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_signal_gives_zero_field() {
        let ens = ensemble(12, 2, 3, 4);
        let f = field(&vec![Complex64::default(); 12], &ens).unwrap();
        assert!(f.iter().all(|c| c.norm() == 0.0));
        let a = adjoint_field(&vec![Complex64::default(); ens.m()], &ens).unwrap();
        assert!(a.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn adjoint_identity() {
        let ens = ensemble(12, 3, 2, 5);
        for seed in 0..5 {
            let x = random(12, seed);
            let v = random(ens.m(), seed + 100);
            let lhs = inner(&field(&x, &ens).unwrap(), &v);
            let rhs = inner(&x, &adjoint_field(&v, &ens).unwrap());
            assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm());
        }
    }

    #[test]
    fn quadratic_homogeneity_and_phase_invariance() {
        let ens = ensemble(16, 2, 1, 6);
        let x = gen_sparse_signal(ens.shape(), 3, 2).unwrap();
        let g = forward(&x, &ens).unwrap();
        let c = Complex64::new(0.3, -1.1);
        let scaled: Vec<Complex64> = x.values.iter().map(|v| v * c).collect();
        let gs = forward_values(&scaled, &ens).unwrap();
        let norm: f64 = g.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        let scale_err: f64 = g
            .values
            .iter()
            .zip(&gs.values)
            .map(|(a, b)| (a * c.norm_sqr() - b).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(scale_err <= 1e-12 * norm * c.norm_sqr());
        let rotated: Vec<Complex64> = x.values.iter().map(|v| v * Complex64::cis(0.77)).collect();
        let gr = forward_values(&rotated, &ens).unwrap();
        let diff: f64 = g.values.iter().zip(&gr.values).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(diff <= 1e-12 * norm);
    }

    #[test]
    fn shape_and_length_checks() {
        let ens = ensemble(8, 1, 1, 0);
        assert!(field(&random(7, 0), &ens).is_err());
        assert!(adjoint_field(&random(7, 0), &ens).is_err());
        let other = gen_sparse_signal(&GridShape::new(vec![2, 4]).unwrap(), 2, 0).unwrap();
        assert!(matches!(forward(&other, &ens), Err(Error::ShapeMismatch(..))));
    }
}
