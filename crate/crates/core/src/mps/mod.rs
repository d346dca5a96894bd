//! Complex tensor-train states with bond-dimension control.
//!
//! Site tensors are stored as flat column-major buffers with index order
//! `(left, phys, right)`, left fastest. With that layout the same buffer is
//! both the `(left·phys) × right` and the `left × (phys·right)` matrix, so
//! the QR/SVD sweeps never permute memory.
//!
//! A state carries a real `log_norm`: the represented vector is
//! `exp(log_norm) · contraction(tensors)`.

mod linalg;
mod mpo;

use num_complex::Complex64;

use crate::dense::{self, CMatrix};
use crate::error::{check_index, check_len, Error, Result};
use crate::pauli::{i_pow, PauliString};

pub use mpo::{Mpo, MpoSite};

pub(crate) use linalg::entropy_bits;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// States with norm below this are reported as collapsed rather than
/// renormalized.
pub const ZERO_NORM_THRESHOLD: f64 = 1e-12;

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TruncationPolicy {
    pub chi_max: usize,
    /// Relative weight `σ²/Σσ²` below which singular values are dropped.
    pub svd_cutoff: f64,
    pub renormalize: bool,
}

impl TruncationPolicy {
    pub const DEFAULT_CUTOFF: f64 = 1e-12;

    pub fn new(chi_max: usize, svd_cutoff: f64, renormalize: bool) -> Result<Self> {
        if chi_max == 0 {
            return Err(Error::Config("chi_max must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&svd_cutoff) {
            return Err(Error::Config(format!("svd_cutoff must lie in [0, 1), got {svd_cutoff}")));
        }
        Ok(TruncationPolicy { chi_max, svd_cutoff, renormalize })
    }

    /// Bond cap `chi` with the default cutoff and renormalization.
    pub fn with_chi(chi: usize) -> Self {
        TruncationPolicy { chi_max: chi.max(1), svd_cutoff: Self::DEFAULT_CUTOFF, renormalize: true }
    }

    /// No bond cap; only prunes singular values at round-off level.
    pub fn exact() -> Self {
        TruncationPolicy { chi_max: usize::MAX, svd_cutoff: 1e-15, renormalize: false }
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self::with_chi(64)
    }
}

/// Outcome of a compression step.
#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct Truncation {
    /// Discarded weight as a fraction of the squared norm before truncation.
    /// For a canonical sweep this equals the fidelity loss exactly.
    pub discarded_weight: f64,
    pub max_bond: usize,
}

impl Truncation {
    pub fn fidelity(&self) -> f64 {
        1.0 - self.discarded_weight
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SiteTensor {
    left: usize,
    phys: usize,
    right: usize,
    data: Vec<C>,
}

impl SiteTensor {
    pub fn zeros(left: usize, phys: usize, right: usize) -> Self {
        SiteTensor { left, phys, right, data: vec![ZERO; left * phys * right] }
    }

    pub fn from_vec(left: usize, phys: usize, right: usize, data: Vec<C>) -> Result<Self> {
        check_len(left * phys * right, data.len())?;
        Ok(SiteTensor { left, phys, right, data })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.left, self.phys, self.right)
    }

    #[inline]
    fn idx(&self, l: usize, s: usize, r: usize) -> usize {
        l + self.left * (s + self.phys * r)
    }

    pub fn get(&self, l: usize, s: usize, r: usize) -> C {
        self.data[self.idx(l, s, r)]
    }

    fn set(&mut self, l: usize, s: usize, r: usize, v: C) {
        let k = self.idx(l, s, r);
        self.data[k] = v;
    }

    /// `(left·phys) × right`
    fn left_matrix(&self) -> CMatrix {
        CMatrix::from_column_slice(self.left * self.phys, self.right, &self.data)
    }

    /// `left × (phys·right)`
    fn right_matrix(&self) -> CMatrix {
        CMatrix::from_column_slice(self.left, self.phys * self.right, &self.data)
    }

    fn from_left_matrix(m: CMatrix, phys: usize) -> Self {
        let (rows, right) = m.shape();
        SiteTensor { left: rows / phys, phys, right, data: m.as_slice().to_vec() }
    }

    fn from_right_matrix(m: CMatrix, phys: usize) -> Self {
        let (left, cols) = m.shape();
        SiteTensor { left, phys, right: cols / phys, data: m.as_slice().to_vec() }
    }

    /// `left × right` slice at fixed physical index.
    fn slice(&self, s: usize) -> CMatrix {
        CMatrix::from_fn(self.left, self.right, |l, r| self.get(l, s, r))
    }

    fn scale(&mut self, c: C) {
        self.data.iter_mut().for_each(|x| *x *= c);
    }

    fn norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Applies a `phys × phys` matrix on the physical index.
    fn apply_local(&mut self, u: &CMatrix) {
        let mut out = vec![ZERO; self.data.len()];
        for r in 0..self.right {
            for so in 0..self.phys {
                for si in 0..self.phys {
                    let w = u[(so, si)];
                    if w == ZERO {
                        continue;
                    }
                    for l in 0..self.left {
                        out[self.idx(l, so, r)] += w * self.data[self.idx(l, si, r)];
                    }
                }
            }
        }
        self.data = out;
    }
}

/// Matrix product state with per-site physical dimension (2 for qubits).
#[derive(Clone, Debug, PartialEq)]
pub struct Mps {
    tensors: Vec<SiteTensor>,
    ortho_center: Option<usize>,
    log_norm: f64,
}

fn pauli_matrix(mu: crate::pauli::PauliIndex) -> CMatrix {
    let m = mu.matrix();
    CMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

impl Mps {
    /// Computational basis product state `|b_0 b_1 …⟩`.
    pub fn product_state(bits: &[u8]) -> Self {
        let vectors: Vec<Vec<C>> = bits
            .iter()
            .map(|&b| if b & 1 == 0 { vec![ONE, ZERO] } else { vec![ZERO, ONE] })
            .collect();
        Self::from_product(&vectors).expect("non-empty local vectors")
    }

    /// Product of arbitrary local vectors (physical dimension = vector length).
    pub fn from_product(vectors: &[Vec<C>]) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Config("an MPS needs at least one site".into()));
        }
        let tensors = vectors
            .iter()
            .map(|v| SiteTensor::from_vec(1, v.len(), 1, v.clone()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Mps { tensors, ortho_center: None, log_norm: 0.0 })
    }

    pub fn from_tensors(tensors: Vec<SiteTensor>) -> Result<Self> {
        if tensors.is_empty() {
            return Err(Error::Config("an MPS needs at least one site".into()));
        }
        check_len(1, tensors[0].left)?;
        check_len(1, tensors[tensors.len() - 1].right)?;
        for w in tensors.windows(2) {
            check_len(w[0].right, w[1].left)?;
        }
        Ok(Mps { tensors, ortho_center: None, log_norm: 0.0 })
    }

    /// Exact decomposition of a dense qubit vector (qubit 0 most significant).
    pub fn from_dense(n: usize, amps: &[C]) -> Result<Self> {
        dense::check_cap(n)?;
        check_len(1 << n, amps.len())?;
        let mut tensors = Vec::with_capacity(n);
        // rest: rows = current left bond, columns = remaining sites (first site fastest)
        let mut left = 1usize;
        let mut rest = CMatrix::from_fn(1, 1 << n, |_, c| {
            // reorder so the first remaining qubit is the fastest column index
            let rev = (0..n).fold(0usize, |acc, j| acc | (((c >> j) & 1) << (n - 1 - j)));
            amps[rev]
        });
        for site in 0..n.saturating_sub(1) {
            let remaining = n - site;
            let cols = 1usize << (remaining - 1);
            // (left·2) × cols
            let m = CMatrix::from_fn(left * 2, cols, |row, col| {
                let (l, s) = (row % left, row / left);
                rest[(l, s + 2 * col)]
            });
            let svd = linalg::svd_truncated(m, &TruncationPolicy::exact());
            let k = svd.s.len();
            tensors.push(SiteTensor::from_left_matrix(svd.u, 2));
            let mut vt = svd.vt;
            linalg::scale_rows(&mut vt, &svd.s);
            rest = vt;
            left = k;
        }
        tensors.push(SiteTensor::from_vec(left, 2, 1, rest.as_slice().to_vec())?);
        let mut m = Mps::from_tensors(tensors)?;
        m.ortho_center = Some(n - 1);
        Ok(m)
    }

    pub fn num_sites(&self) -> usize {
        self.tensors.len()
    }

    pub fn phys_dim(&self, site: usize) -> usize {
        self.tensors[site].phys
    }

    pub fn tensor(&self, site: usize) -> &SiteTensor {
        &self.tensors[site]
    }

    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    pub fn ortho_center(&self) -> Option<usize> {
        self.ortho_center
    }

    /// Bond dimensions, length `n + 1` with unit boundaries.
    pub fn bond_dims(&self) -> Vec<usize> {
        std::iter::once(1).chain(self.tensors.iter().map(|t| t.right)).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    fn check_qubits(&self) -> Result<()> {
        match self.tensors.iter().find(|t| t.phys != 2) {
            Some(t) => Err(Error::DimensionMismatch { expected: 2, found: t.phys }),
            None => Ok(()),
        }
    }

    /// Multiplies the state by `c`.
    pub fn scale(&mut self, c: C) {
        let k = self.ortho_center.unwrap_or(0);
        self.tensors[k].scale(c);
    }

    /// Moves the scale of the tensor network into `log_norm` so the tensors
    /// have unit norm (requires a known orthogonality center).
    fn absorb_norm(&mut self) {
        if let Some(c) = self.ortho_center {
            let nrm = self.tensors[c].norm();
            if nrm > 0.0 {
                self.tensors[c].scale(C::new(1.0 / nrm, 0.0));
                self.log_norm += nrm.ln();
            }
        }
    }

    fn left_orthogonalize(&mut self, k: usize) {
        let phys = self.tensors[k].phys;
        let (q, r) = linalg::qr(self.tensors[k].left_matrix());
        self.tensors[k] = SiteTensor::from_left_matrix(q, phys);
        let next = &self.tensors[k + 1];
        let m = r * next.right_matrix();
        self.tensors[k + 1] = SiteTensor::from_right_matrix(m, next.phys);
    }

    fn right_orthogonalize(&mut self, k: usize) {
        let phys = self.tensors[k].phys;
        let (q, r) = linalg::qr(self.tensors[k].right_matrix().adjoint());
        self.tensors[k] = SiteTensor::from_right_matrix(q.adjoint(), phys);
        let prev = &self.tensors[k - 1];
        let m = prev.left_matrix() * r.adjoint();
        self.tensors[k - 1] = SiteTensor::from_left_matrix(m, prev.phys);
    }

    /// Brings the state to mixed canonical form centred on `site`.
    pub fn move_center(&mut self, site: usize) -> Result<()> {
        check_index(site, self.num_sites())?;
        let n = self.num_sites();
        let (from_left, from_right) = match self.ortho_center {
            Some(c) => (c, c),
            None => (0, n - 1),
        };
        for k in from_left..site {
            self.left_orthogonalize(k);
        }
        for k in (site + 1..=from_right).rev() {
            self.right_orthogonalize(k);
        }
        self.ortho_center = Some(site);
        Ok(())
    }

    /// Norm of the represented vector.
    pub fn norm(&self) -> f64 {
        match self.ortho_center {
            Some(c) => self.tensors[c].norm() * self.log_norm.exp(),
            None => self.inner(self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(0.0),
        }
    }

    /// Rescales to unit norm, folding the removed scale into `log_norm`.
    pub fn normalize(&mut self) {
        if self.ortho_center.is_none() {
            let _ = self.move_center(0);
        }
        self.absorb_norm();
        self.log_norm = 0.0;
    }

    /// QR sweep over `lo..hi` then truncating SVD sweep `hi → lo+1`. Sites
    /// left of `lo` must be left-isometric and sites right of `hi`
    /// right-isometric; the centre ends at `lo`. Returns `Err(ZeroState)`
    /// when the norm found by the QR sweep is below `zero_threshold`.
    fn compress_window(
        &mut self,
        lo: usize,
        hi: usize,
        policy: &TruncationPolicy,
        zero_threshold: Option<f64>,
    ) -> Result<Truncation> {
        for k in lo..hi {
            self.left_orthogonalize(k);
        }
        self.ortho_center = Some(hi);
        let raw = self.tensors[hi].norm();
        if let Some(th) = zero_threshold {
            let norm = raw * self.log_norm.exp();
            if norm < th || !norm.is_finite() {
                return Err(Error::ZeroState(norm));
            }
        }
        let total = raw * raw;
        let mut discarded = 0.0;
        for k in (lo + 1..=hi).rev() {
            let phys = self.tensors[k].phys;
            let svd = linalg::svd_truncated(self.tensors[k].right_matrix(), policy);
            discarded += svd.discarded;
            self.tensors[k] = SiteTensor::from_right_matrix(svd.vt, phys);
            let mut us = svd.u;
            linalg::scale_cols(&mut us, &svd.s);
            let prev = &self.tensors[k - 1];
            let m = prev.left_matrix() * us;
            self.tensors[k - 1] = SiteTensor::from_left_matrix(m, prev.phys);
        }
        self.ortho_center = Some(lo);
        if policy.renormalize {
            self.absorb_norm();
        }
        let discarded_weight = if total > 0.0 { discarded / total } else { 0.0 };
        Ok(Truncation { discarded_weight, max_bond: self.max_bond() })
    }

    /// Two-pass compression: orthogonalize left to right, then truncate
    /// right to left under `policy`.
    pub fn compress(&mut self, policy: &TruncationPolicy) -> Truncation {
        let n = self.num_sites();
        self.compress_window(0, n - 1, policy, None).expect("no zero check requested")
    }

    /// Like [`Mps::compress`] but reports a collapsed state as
    /// `Err(ZeroState)` instead of compressing it.
    pub fn compress_checked(&mut self, policy: &TruncationPolicy) -> Result<Truncation> {
        let n = self.num_sites();
        self.compress_window(0, n - 1, policy, Some(ZERO_NORM_THRESHOLD))
    }

    pub fn apply_1q_gate(&mut self, u: &CMatrix, site: usize) -> Result<()> {
        let defect = dense::unitarity_defect(u);
        if defect > 1e-10 {
            return Err(Error::NotUnitary(defect));
        }
        self.apply_local_matrix(u, site)?;
        Ok(())
    }

    /// Applies any `d × d` matrix on one site; the canonical form is dropped
    /// unless the caller knows the matrix is unitary.
    pub fn apply_local_matrix(&mut self, u: &CMatrix, site: usize) -> Result<()> {
        check_index(site, self.num_sites())?;
        let d = self.tensors[site].phys;
        if u.shape() != (d, d) {
            return Err(Error::DimensionMismatch { expected: d, found: u.nrows() });
        }
        self.tensors[site].apply_local(u);
        if dense::unitarity_defect(u) > 1e-10 {
            self.ortho_center = None;
        }
        Ok(())
    }

    /// Applies a 4×4 unitary on `(site, site + 1)`, the first qubit being the
    /// more significant local index, then splits by a truncated SVD.
    pub fn apply_2q_gate(&mut self, u: &CMatrix, site: usize, policy: &TruncationPolicy) -> Result<Truncation> {
        self.check_qubits()?;
        check_index(site + 1, self.num_sites())?;
        if u.shape() != (4, 4) {
            return Err(Error::DimensionMismatch { expected: 4, found: u.nrows() });
        }
        let defect = dense::unitarity_defect(u);
        if defect > 1e-10 {
            return Err(Error::NotUnitary(defect));
        }
        self.move_center(site)?;
        let (a, b) = (&self.tensors[site], &self.tensors[site + 1]);
        let (left, right) = (a.left, b.right);
        // theta rows: l + left*s1, cols: s2 + 2*r
        let theta = a.left_matrix() * b.right_matrix();
        let mut out = CMatrix::zeros(left * 2, 2 * right);
        for r in 0..right {
            for l in 0..left {
                let v = [
                    theta[(l, 2 * r)],
                    theta[(l, 1 + 2 * r)],
                    theta[(l + left, 2 * r)],
                    theta[(l + left, 1 + 2 * r)],
                ];
                for (o, (s1, s2)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                    let val: C = (0..4).map(|i| u[(o, i)] * v[i]).sum();
                    out[(l + left * s1, s2 + 2 * r)] = val;
                }
            }
        }
        let total = out.norm_squared();
        let svd = linalg::svd_truncated(out, policy);
        self.tensors[site] = SiteTensor::from_left_matrix(svd.u, 2);
        let mut svt = svd.vt;
        linalg::scale_rows(&mut svt, &svd.s);
        self.tensors[site + 1] = SiteTensor::from_right_matrix(svt, 2);
        self.ortho_center = Some(site + 1);
        if policy.renormalize {
            self.absorb_norm();
        }
        let discarded_weight = if total > 0.0 { svd.discarded / total } else { 0.0 };
        Ok(Truncation { discarded_weight, max_bond: self.max_bond() })
    }

    /// Applies a Hermitian Pauli string (its sign included).
    pub fn apply_pauli_string(&mut self, p: &PauliString) -> Result<()> {
        self.check_qubits()?;
        check_len(self.num_sites(), p.num_qubits())?;
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_string()));
        }
        self.apply_pauli_unchecked(p);
        Ok(())
    }

    fn apply_pauli_unchecked(&mut self, p: &PauliString) {
        for j in p.support() {
            self.tensors[j].apply_local(&pauli_matrix(p.get(j)));
        }
        if p.phase_exp() != 0 {
            self.scale(i_pow(p.phase_exp()));
        }
    }

    /// `c|ψ⟩ + d·p|ψ⟩` for a Pauli string `p`, built as the bond-2 diagonal
    /// MPO restricted to the span of `p`'s support and compressed there.
    pub fn apply_pauli_combination(
        &mut self,
        p: &PauliString,
        c: C,
        d: C,
        policy: &TruncationPolicy,
    ) -> Result<Truncation> {
        self.check_qubits()?;
        check_len(self.num_sites(), p.num_qubits())?;
        let d = d * i_pow(p.phase_exp());
        let support = p.support();
        let (lo, hi) = match (support.first(), support.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => {
                self.scale(c + d);
                return Ok(Truncation { discarded_weight: 0.0, max_bond: self.max_bond() });
            }
        };
        self.move_center(lo)?;
        if lo == hi {
            let t = &self.tensors[lo];
            let mut moved = t.clone();
            moved.apply_local(&pauli_matrix(p.get(lo)));
            let data = t.data.iter().zip(&moved.data).map(|(a, b)| c * a + d * b).collect();
            self.tensors[lo].data = data;
            let norm = self.tensors[lo].norm() * self.log_norm.exp();
            if norm < ZERO_NORM_THRESHOLD {
                return Err(Error::ZeroState(norm));
            }
            if policy.renormalize {
                self.absorb_norm();
            }
            return Ok(Truncation { discarded_weight: 0.0, max_bond: self.max_bond() });
        }
        for j in lo..=hi {
            let a = &self.tensors[j];
            let mut b = a.clone();
            if p.get(j) != crate::pauli::PauliIndex::I {
                b.apply_local(&pauli_matrix(p.get(j)));
            }
            self.tensors[j] = if j == lo {
                concat_right(a, &b, ONE, ONE)
            } else if j == hi {
                concat_left(a, &b, c, d)
            } else {
                block_diag(a, &b)
            };
        }
        self.compress_window(lo, hi, policy, Some(ZERO_NORM_THRESHOLD))
    }

    /// `ca·a + cb·b`, by direct sum followed by compression. A result with
    /// norm below [`ZERO_NORM_THRESHOLD`] is reported as `Err(ZeroState)`.
    pub fn add(a: &Mps, b: &Mps, ca: C, cb: C, policy: &TruncationPolicy) -> Result<(Mps, Truncation)> {
        let n = a.num_sites();
        check_len(n, b.num_sites())?;
        for j in 0..n {
            if a.tensors[j].phys != b.tensors[j].phys {
                return Err(Error::DimensionMismatch { expected: a.tensors[j].phys, found: b.tensors[j].phys });
            }
        }
        let m = a.log_norm.max(b.log_norm);
        let ca = ca * (a.log_norm - m).exp();
        let cb = cb * (b.log_norm - m).exp();
        let tensors = if n == 1 {
            let (x, y) = (&a.tensors[0], &b.tensors[0]);
            let data = x.data.iter().zip(&y.data).map(|(p, q)| ca * p + cb * q).collect();
            vec![SiteTensor::from_vec(1, x.phys, 1, data)?]
        } else {
            (0..n)
                .map(|j| {
                    let (x, y) = (&a.tensors[j], &b.tensors[j]);
                    if j == 0 {
                        concat_right(x, y, ca, cb)
                    } else if j == n - 1 {
                        concat_left(x, y, ONE, ONE)
                    } else {
                        block_diag(x, y)
                    }
                })
                .collect()
        };
        let mut out = Mps { tensors, ortho_center: None, log_norm: m };
        let report = out.compress_window(0, n - 1, policy, Some(ZERO_NORM_THRESHOLD))?;
        Ok((out, report))
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Mps) -> Result<C> {
        let n = self.num_sites();
        check_len(n, other.num_sites())?;
        let mut env = CMatrix::from_element(1, 1, ONE);
        for j in 0..n {
            let (a, b) = (&self.tensors[j], &other.tensors[j]);
            if a.phys != b.phys {
                return Err(Error::DimensionMismatch { expected: a.phys, found: b.phys });
            }
            let mut next = CMatrix::zeros(a.right, b.right);
            for s in 0..a.phys {
                next += a.slice(s).adjoint() * &env * b.slice(s);
            }
            env = next;
        }
        Ok(env[(0, 0)] * (self.log_norm + other.log_norm).exp())
    }

    /// `⟨ψ|p|ψ⟩ / ⟨ψ|ψ⟩` without discarding the imaginary part.
    pub fn expect_pauli_complex(&self, p: &PauliString) -> Result<C> {
        self.check_qubits()?;
        check_len(self.num_sites(), p.num_qubits())?;
        let mut moved = self.clone();
        moved.apply_pauli_unchecked(p);
        let norm2 = self.inner(self)?.re;
        Ok(self.inner(&moved)? / norm2)
    }

    /// Expectation of a Hermitian Pauli string.
    pub fn expect_pauli(&self, p: &PauliString) -> Result<f64> {
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_string()));
        }
        let z = self.expect_pauli_complex(p)?;
        debug_assert!(z.im.abs() < 1e-8, "imaginary residual {} in <{p}>", z.im);
        Ok(z.re)
    }

    /// Schmidt values across bond `cut` (between sites `cut - 1` and `cut`).
    /// Moves the orthogonality centre; the represented state is unchanged.
    pub fn schmidt_values(&mut self, cut: usize) -> Result<Vec<f64>> {
        let n = self.num_sites();
        if cut == 0 || cut >= n {
            check_index(cut, n + 1)?;
            return Ok(vec![self.norm()]);
        }
        self.move_center(cut)?;
        let sv = self.tensors[cut].right_matrix().singular_values();
        let mut v: Vec<f64> = sv.iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        Ok(v)
    }

    /// Von Neumann entropy in bits across bond `cut`.
    pub fn entanglement_entropy(&self, cut: usize) -> Result<f64> {
        let mut tmp = self.clone();
        Ok(entropy_bits(&tmp.schmidt_values(cut)?))
    }

    /// Entropy across the middle bond `⌈n/2⌉`.
    pub fn half_chain_entropy(&self) -> Result<f64> {
        self.entanglement_entropy(self.num_sites().div_ceil(2))
    }

    /// Dense amplitudes, site 0 most significant.
    pub fn to_dense(&self) -> Result<Vec<C>> {
        let total: usize = self.tensors.iter().map(|t| t.phys).product();
        if total > 1 << dense::oracle_cap() {
            return Err(Error::OracleCap { n: self.num_sites(), cap: dense::oracle_cap() });
        }
        // rows: basis index of processed sites, cols: current right bond
        let mut acc = CMatrix::from_element(1, 1, ONE);
        for t in &self.tensors {
            let rows = acc.nrows();
            let mut next = CMatrix::zeros(rows * t.phys, t.right);
            for s in 0..t.phys {
                let part = &acc * t.slice(s);
                for r in 0..rows {
                    for c in 0..t.right {
                        next[(r * t.phys + s, c)] = part[(r, c)];
                    }
                }
            }
            acc = next;
        }
        let scale = self.log_norm.exp();
        Ok(acc.column(0).iter().map(|x| x * scale).collect())
    }

    pub fn to_dense_state(&self) -> Result<dense::DenseState> {
        self.check_qubits()?;
        dense::DenseState::from_amplitudes(self.num_sites(), self.to_dense()?)
    }

    pub fn is_left_isometry(&self, site: usize, tol: f64) -> bool {
        let m = self.tensors[site].left_matrix();
        (m.adjoint() * &m - CMatrix::identity(m.ncols(), m.ncols())).norm() < tol
    }

    pub fn is_right_isometry(&self, site: usize, tol: f64) -> bool {
        let m = self.tensors[site].right_matrix();
        (&m * m.adjoint() - CMatrix::identity(m.nrows(), m.nrows())).norm() < tol
    }

    /// Element-wise complex conjugate state.
    pub fn conj(&self) -> Mps {
        let mut out = self.clone();
        for t in &mut out.tensors {
            t.data.iter_mut().for_each(|x| *x = x.conj());
        }
        out
    }

    /// Applies a matrix product operator exactly, then compresses.
    pub fn apply_mpo(&mut self, mpo: &Mpo, policy: &TruncationPolicy) -> Result<Truncation> {
        check_len(self.num_sites(), mpo.num_sites())?;
        let tensors = self
            .tensors
            .iter()
            .zip(mpo.sites())
            .map(|(a, w)| w.contract(a))
            .collect::<Result<Vec<_>>>()?;
        self.tensors = tensors;
        self.ortho_center = None;
        Ok(self.compress(policy))
    }
}

/// `[x·ca | y·cb]` along the right bond (left bonds must agree).
fn concat_right(x: &SiteTensor, y: &SiteTensor, ca: C, cb: C) -> SiteTensor {
    debug_assert_eq!(x.left, y.left);
    let mut out = SiteTensor::zeros(x.left, x.phys, x.right + y.right);
    for s in 0..x.phys {
        for l in 0..x.left {
            for r in 0..x.right {
                out.set(l, s, r, ca * x.get(l, s, r));
            }
            for r in 0..y.right {
                out.set(l, s, x.right + r, cb * y.get(l, s, r));
            }
        }
    }
    out
}

/// `[x·ca ; y·cb]` stacked along the left bond (right bonds must agree).
fn concat_left(x: &SiteTensor, y: &SiteTensor, ca: C, cb: C) -> SiteTensor {
    debug_assert_eq!(x.right, y.right);
    let mut out = SiteTensor::zeros(x.left + y.left, x.phys, x.right);
    for s in 0..x.phys {
        for r in 0..x.right {
            for l in 0..x.left {
                out.set(l, s, r, ca * x.get(l, s, r));
            }
            for l in 0..y.left {
                out.set(x.left + l, s, r, cb * y.get(l, s, r));
            }
        }
    }
    out
}

fn block_diag(x: &SiteTensor, y: &SiteTensor) -> SiteTensor {
    let mut out = SiteTensor::zeros(x.left + y.left, x.phys, x.right + y.right);
    for s in 0..x.phys {
        for r in 0..x.right {
            for l in 0..x.left {
                out.set(l, s, r, x.get(l, s, r));
            }
        }
        for r in 0..y.right {
            for l in 0..y.left {
                out.set(x.left + l, s, x.right + r, y.get(l, s, r));
            }
        }
    }
    out
}
