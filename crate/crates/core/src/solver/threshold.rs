use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::SensingEnsemble;

/// Indices of the `s` largest entries of `scores`, in increasing index order.
/// Ties go to the lower index.
pub fn top_indices(scores: &[f64], s: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order.truncate(s);
    order.sort_unstable();
    order
}

/// `H_s`: keeps the `s` entries of largest modulus and zeroes the rest.
pub fn hard_threshold(w: &[Complex64], s: usize) -> Vec<Complex64> {
    let moduli: Vec<f64> = w.iter().map(|c| c.norm()).collect();
    let mut out = vec![Complex64::default(); w.len()];
    for q in top_indices(&moduli, s) {
        out[q] = w[q];
    }
    out
}

/// `(1/m) sum_k g_k |(F b_k)_q|^2` for every Fourier index `q`.
///
/// `F b_k` is the conjugated row of `M_p D_p S_r` with `M_p = F T_p F^H`
/// circulant, so each `(p, r)` block reduces to one circular correlation of
/// the intensities with `|h_p|^2`, where `h_p` is the first column of `M_p`.
pub fn support_scores(g: &[f64], ens: &SensingEnsemble) -> Result<Vec<f64>> {
    let n = ens.n();
    let m = ens.m();
    if g.len() != m {
        return Err(Error::LengthMismatch { expected: m, got: g.len() });
    }
    let shape = ens.shape();
    let fourier = ens.fourier();
    let root_n = (n as f64).sqrt();
    let mut scores = vec![0.0; n];
    let mut buf = vec![Complex64::default(); n];
    for p in 0..ens.num_distances() {
        // h_p = F (T_p . F^H e_0)
        let mut h = vec![Complex64::default(); n];
        h[0] = Complex64::new(1.0, 0.0);
        fourier.inverse(&mut h);
        for (v, t) in h.iter_mut().zip(&ens.transfer(p).values) {
            *v *= t;
        }
        fourier.forward(&mut h);
        // transform of j -> |h_p(-j)|^2
        let mut kernel: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(h[shape.negate_index(j)].norm_sqr(), 0.0))
            .collect();
        fourier.forward(&mut kernel);
        for r in 0..ens.num_regions() {
            let start = ens.index(0, p, r);
            for (b, v) in buf.iter_mut().zip(&g[start..start + n]) {
                *b = Complex64::new(*v, 0.0);
            }
            fourier.forward(&mut buf);
            for (b, k) in buf.iter_mut().zip(&kernel) {
                *b *= k * root_n;
            }
            fourier.inverse(&mut buf);
            for (q, coded) in ens.coded_selector(p, r).iter().enumerate() {
                let weight = coded.norm_sqr();
                if weight > 0.0 {
                    scores[q] += weight * buf[q].re;
                }
            }
        }
    }
    for v in &mut scores {
        *v /= m as f64;
    }
    Ok(scores)
}

/// Estimated Fourier support: the `s` largest support scores.
pub fn select_support(g: &[f64], ens: &SensingEnsemble, s: usize) -> Result<Vec<usize>> {
    let n = ens.n();
    if s < 1 || s > n {
        return Err(Error::InvalidSparsity { s, n });
    }
    Ok(top_indices(&support_scores(g, ens)?, s))
}
