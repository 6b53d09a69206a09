use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ensemble::SensingEnsemble;
use crate::error::{Error, Result};
use crate::grid::dense_dft_matrix;

/// Largest `m * n` the dense oracle will materialize.
pub const DENSE_ENTRY_LIMIT: usize = 10_000_000;

/// The `m x n` matrix `B` whose rows are `(b^r_{p,i})^H`, assembled from
/// dense factors `F T(z_p) F^H D_p S_r F`. Independent of the FFT path.
pub fn explicit_matrix(ens: &SensingEnsemble) -> Result<DMatrix<Complex64>> {
    let (n, m) = (ens.n(), ens.m());
    if m.saturating_mul(n) > DENSE_ENTRY_LIMIT {
        return Err(Error::SizeGuard {
            rows: m,
            cols: n,
            limit: DENSE_ENTRY_LIMIT,
        });
    }
    let dft = dense_dft_matrix(ens.shape());
    let dft_h = dft.adjoint();
    let gain = Complex64::new(ens.gain(), 0.0);
    let mut out = DMatrix::zeros(m, n);
    for p in 0..ens.num_distances() {
        // F T(z_p) F^H, with the diagonal applied as a column scaling of F
        let mut propagate = dft.clone();
        for (mut col, t) in propagate.column_iter_mut().zip(&ens.transfer(p).values) {
            col *= *t;
        }
        let propagate = propagate * &dft_h;
        for r in 0..ens.num_regions() {
            let mut coded = propagate.clone();
            for (j, mut col) in coded.column_iter_mut().enumerate() {
                let keep = ens.regions().region_of(j) == r;
                col *= if keep { ens.aperture(p).values[j] * gain } else { Complex64::default() };
            }
            let block = coded * &dft;
            let start = ens.index(0, p, r);
            out.view_mut((start, 0), (n, n)).copy_from(&block);
        }
    }
    Ok(out)
}
