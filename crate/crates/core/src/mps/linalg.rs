use num_complex::Complex64;

use crate::dense::CMatrix;

use super::TruncationPolicy;

pub(crate) struct TruncatedSvd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub vt: CMatrix,
    /// Sum of squared singular values that were dropped.
    pub discarded: f64,
}

/// Thin SVD sorted by decreasing singular value, truncated by `policy`:
/// first to `chi_max`, then dropping values whose relative weight
/// `σ²/Σσ²` falls below `svd_cutoff`. At least one value is kept.
pub(crate) fn svd_truncated(m: CMatrix, policy: &TruncationPolicy) -> TruncatedSvd {
    let (u, sv, vt) = thin_svd(&m);
    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));
    let total: f64 = sv.iter().map(|s| s * s).sum();
    let mut keep = order.len().min(policy.chi_max).max(1);
    if total > 0.0 {
        while keep > 1 && sv[order[keep - 1]].powi(2) / total < policy.svd_cutoff {
            keep -= 1;
        }
    }
    let kept = &order[..keep];
    let discarded = order[keep..].iter().map(|&k| sv[k] * sv[k]).sum();
    let u = CMatrix::from_fn(u.nrows(), keep, |r, c| u[(r, kept[c])]);
    let vt = CMatrix::from_fn(keep, vt.ncols(), |r, c| vt[(kept[r], c)]);
    let s = kept.iter().map(|&k| sv[k]).collect();
    TruncatedSvd { u, s, vt, discarded }
}

fn to_faer(m: &CMatrix) -> faer::Mat<Complex64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

fn from_faer(m: faer::MatRef<'_, Complex64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Thin SVD `m = u diag(s) vt`, computed with faer.
fn thin_svd(m: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return (CMatrix::zeros(m.nrows(), 0), Vec::new(), CMatrix::zeros(0, m.ncols()));
    }
    let svd = to_faer(m).thin_svd().expect("svd converges");
    let s = svd.S().column_vector();
    let s = (0..k).map(|i| s[i].re).collect();
    (from_faer(svd.U()), s, from_faer(svd.V()).adjoint())
}

/// Thin QR: `m = q r` with `q` having orthonormal columns.
pub(crate) fn qr(m: CMatrix) -> (CMatrix, CMatrix) {
    let qr = to_faer(&m).qr();
    (from_faer(qr.compute_thin_Q().as_ref()), from_faer(qr.thin_R()))
}

pub(crate) fn scale_rows(m: &mut CMatrix, s: &[f64]) {
    for (r, &sv) in s.iter().enumerate() {
        m.row_mut(r).iter_mut().for_each(|x| *x *= Complex64::new(sv, 0.0));
    }
}

pub(crate) fn scale_cols(m: &mut CMatrix, s: &[f64]) {
    for (c, &sv) in s.iter().enumerate() {
        m.column_mut(c).iter_mut().for_each(|x| *x *= Complex64::new(sv, 0.0));
    }
}

/// Entropy in bits of the normalized squared spectrum.
pub(crate) fn entropy_bits(s: &[f64]) -> f64 {
    let total: f64 = s.iter().map(|x| x * x).sum();
    if total <= 0.0 {
        return 0.0;
    }
    s.iter()
        .map(|x| x * x / total)
        .filter(|&w| w > 0.0)
        .map(|w| -w * w.log2())
        .sum::<f64>()
        .max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    // low-rank products of entries in {0, ±½, ±i/2}, the shapes Clifford states produce
    #[test]
    fn reconstructs_degenerate_complex_matrices() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let h = 0.5;
        let vals = [(0.0, 0.0), (h, 0.0), (0.0, h), (-h, 0.0), (0.0, -h)].map(|(a, b)| Complex64::new(a, b));
        let mut worst = 0.0f64;
        for _ in 0..20000 {
            let (r, c, k) = (rng.gen_range(1..9), rng.gen_range(1..9), rng.gen_range(1..4));
            let a = CMatrix::from_fn(r, k, |_, _| vals[rng.gen_range(0..5)]);
            let b = CMatrix::from_fn(k, c, |_, _| vals[rng.gen_range(0..5)]);
            let m = a * b;
            let (mut u, s, vt) = thin_svd(&m);
            scale_cols(&mut u, &s);
            worst = worst.max((u * vt - &m).norm());
            let (q, r) = qr(m.clone());
            worst = worst.max((q * r - &m).norm());
        }
        assert!(worst < 1e-12, "{worst:e}");
    }
}
