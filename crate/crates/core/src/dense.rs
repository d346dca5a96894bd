//! Dense statevector and matrix helpers used as small-`n` oracles.

use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{check_index, check_len, Error, Result};
use crate::pauli::{i_pow, PauliString};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const DEFAULT_ORACLE_CAP: usize = 12;

static ORACLE_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ORACLE_CAP);

pub fn oracle_cap() -> usize {
    ORACLE_CAP.load(Ordering::Relaxed)
}

/// Raise or lower the largest qubit count for which dense objects are built.
pub fn set_oracle_cap(cap: usize) {
    ORACLE_CAP.store(cap, Ordering::Relaxed);
}

pub(crate) fn check_cap(n: usize) -> Result<()> {
    let cap = oracle_cap();
    if n > cap {
        Err(Error::OracleCap { n, cap })
    } else {
        Ok(())
    }
}

/// Entry-wise comparison with absolute tolerance.
pub fn approx_eq(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| (x - y).norm() <= tol)
}

/// Compare two matrices (or vectors) up to a global phase.
pub fn equal_up_to_phase(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
    if a.shape() != b.shape() {
        return false;
    }
    let (k, pivot) = match a.iter().enumerate().max_by(|x, y| x.1.norm().total_cmp(&y.1.norm())) {
        Some((k, v)) => (k, *v),
        None => return true,
    };
    if pivot.norm() < tol {
        return b.iter().all(|v| v.norm() <= tol);
    }
    let other = b.iter().nth(k).copied().unwrap_or_default();
    if other.norm() < tol {
        return false;
    }
    let phase = other / pivot;
    let phase = phase / phase.norm();
    a.iter().zip(b.iter()).all(|(x, y)| (x * phase - y).norm() <= tol)
}

pub fn random_matrix(dim: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    })
}

/// Random unitary from the QR factor of a random complex matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMatrix {
    random_matrix(dim, rng).qr().q()
}

pub fn unitarity_defect(u: &CMatrix) -> f64 {
    (u.adjoint() * u - CMatrix::identity(u.ncols(), u.ncols())).norm()
}

/// Kronecker product with `a` acting on the more significant qubits.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Full `2^n` statevector; qubit 0 is the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn product(bits: &[u8]) -> Result<Self> {
        check_cap(bits.len())?;
        let n = bits.len();
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        amps[idx] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    pub fn zeros_state(n: usize) -> Result<Self> {
        Self::product(&vec![0; n])
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_cap(n)?;
        check_len(1 << n, amps.len())?;
        Ok(DenseState { n, amps })
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Result<Self> {
        check_cap(n)?;
        let mut amps: Vec<_> = (0..1usize << n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(DenseState { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn to_vector(&self) -> CVector {
        CVector::from_column_slice(&self.amps)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= c);
    }

    pub fn apply_1q(&mut self, u: &CMatrix, q: usize) -> Result<()> {
        check_index(q, self.n)?;
        let shift = self.n - 1 - q;
        let bit = 1usize << shift;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                self.amps[i | bit] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
            }
        }
        Ok(())
    }

    /// Applies a 4×4 matrix on qubits `(a, b)`, `a` being the more significant
    /// index of the local basis `|q_a q_b⟩`.
    pub fn apply_2q(&mut self, u: &CMatrix, a: usize, b: usize) -> Result<()> {
        check_index(a, self.n)?;
        check_index(b, self.n)?;
        if a == b {
            return Err(Error::RepeatedQubit(a));
        }
        let ba = 1usize << (self.n - 1 - a);
        let bb = 1usize << (self.n - 1 - b);
        for i in 0..self.amps.len() {
            if i & ba == 0 && i & bb == 0 {
                let idx = [i, i | bb, i | ba, i | ba | bb];
                let v: Vec<_> = idx.iter().map(|&k| self.amps[k]).collect();
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] = (0..4).map(|c| u[(r, c)] * v[c]).sum();
                }
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        check_len(self.n, p.num_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        let idx = p.indices();
        let pre = i_pow(p.phase_exp());
        for (col, &a) in self.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut row = 0usize;
            let mut amp = pre * a;
            for (j, mu) in idx.iter().enumerate() {
                let shift = self.n - 1 - j;
                let bit = (col >> shift) & 1;
                let outb = if mu.bits().0 { bit ^ 1 } else { bit };
                amp *= mu.matrix()[outb][bit];
                row |= outb << shift;
            }
            out[row] += amp;
        }
        self.amps = out;
        Ok(())
    }

    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        check_len(self.n, other.n)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `⟨ψ|p|ψ⟩ / ⟨ψ|ψ⟩`.
    pub fn expect_pauli(&self, p: &PauliString) -> Result<Complex64> {
        let mut moved = self.clone();
        moved.apply_pauli(p)?;
        Ok(self.inner(&moved)? / self.norm().powi(2))
    }

    /// `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr() / (self.norm() * other.norm()).powi(2))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Von Neumann entropy (bits) across the bond after the first `cut` qubits.
    pub fn entropy(&self, cut: usize) -> f64 {
        let rows = 1usize << cut;
        let cols = 1usize << (self.n - cut);
        let m = CMatrix::from_fn(rows, cols, |r, c| self.amps[r * cols + c]);
        let sv = m.singular_values();
        let total: f64 = sv.iter().map(|s| s * s).sum();
        sv.iter()
            .map(|s| s * s / total)
            .filter(|&w| w > 1e-300)
            .map(|w| -w * w.log2())
            .sum()
    }
}
