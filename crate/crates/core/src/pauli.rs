//! Pauli strings in binary symplectic form.
//!
//! A string is stored as packed `x`/`z` bit vectors plus a phase exponent
//! `k`, representing `i^k · σ^{μ_0} ⊗ … ⊗ σ^{μ_{n-1}}` where every local
//! factor is one of the Hermitian Paulis {I, X, Y, Z}. Internally products
//! are computed in the `X^x Z^z` form, where each `Y` site carries an extra
//! factor of `i` (`Y = iXZ`). Hermitian strings are exactly those with
//! `k ∈ {0, 2}`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dense::{self, CMatrix};
use crate::error::{check_len, Error, Result};

const WORD: usize = 64;

/// Local Pauli label: 0 ↔ I, 1 ↔ X, 2 ↔ Y, 3 ↔ Z.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliIndex(u8);

impl PauliIndex {
    pub const I: PauliIndex = PauliIndex(0);
    pub const X: PauliIndex = PauliIndex(1);
    pub const Y: PauliIndex = PauliIndex(2);
    pub const Z: PauliIndex = PauliIndex(3);
    pub const ALL: [PauliIndex; 4] = [Self::I, Self::X, Self::Y, Self::Z];

    pub fn new(mu: u8) -> Result<Self> {
        if mu < 4 {
            Ok(PauliIndex(mu))
        } else {
            Err(Error::IndexOutOfRange { index: mu as usize, n: 4 })
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Self::I,
            (true, false) => Self::X,
            (true, true) => Self::Y,
            (false, true) => Self::Z,
        }
    }

    /// `(x, z)` symplectic bits.
    pub fn bits(self) -> (bool, bool) {
        match self.0 {
            0 => (false, false),
            1 => (true, false),
            2 => (true, true),
            _ => (false, true),
        }
    }

    /// Bitwise xor on the `(x, z)` encoding; equals the label of `σ^a σ^b`
    /// up to phase.
    pub fn xor(self, other: Self) -> Self {
        let (ax, az) = self.bits();
        let (bx, bz) = other.bits();
        Self::from_bits(ax ^ bx, az ^ bz)
    }

    pub fn letter(self) -> char {
        ['I', 'X', 'Y', 'Z'][self.0 as usize]
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' => Some(Self::I),
            'X' => Some(Self::X),
            'Y' => Some(Self::Y),
            'Z' => Some(Self::Z),
            _ => None,
        }
    }

    /// The 2×2 Hermitian Pauli matrix.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self.0 {
            0 => [[l, o], [o, l]],
            1 => [[o, l], [l, o]],
            2 => [[o, -i], [i, o]],
            _ => [[l, o], [o, -l]],
        }
    }
}

/// `i^k` for `k` taken mod 4.
pub fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: u8,
}

fn words(n: usize) -> usize {
    n.div_ceil(WORD)
}

fn popcount_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(p, q)| (p & q).count_ones()).sum()
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString { n, x: vec![0; words(n)], z: vec![0; words(n)], phase: 0 }
    }

    /// `+σ^{μ}` on one site, identity elsewhere.
    pub fn single(n: usize, site: usize, mu: PauliIndex) -> Result<Self> {
        crate::error::check_index(site, n)?;
        let mut p = Self::identity(n);
        p.set(site, mu);
        Ok(p)
    }

    pub fn from_indices(indices: &[PauliIndex]) -> Self {
        let mut p = Self::identity(indices.len());
        for (j, &mu) in indices.iter().enumerate() {
            p.set(j, mu);
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// Exponent `k` of the `i^k` prefactor (relative to Hermitian local factors).
    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn with_phase(mut self, k: u8) -> Self {
        self.phase = k % 4;
        self
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// `+1` or `-1` for Hermitian strings.
    pub fn sign(&self) -> Result<f64> {
        match self.phase {
            0 => Ok(1.0),
            2 => Ok(-1.0),
            _ => Err(Error::NotHermitian(self.to_string())),
        }
    }

    /// Same Pauli content with phase reset to `+1`.
    pub fn unsigned(&self) -> Self {
        let mut p = self.clone();
        p.phase = 0;
        p
    }

    pub fn get(&self, site: usize) -> PauliIndex {
        let (w, b) = (site / WORD, site % WORD);
        PauliIndex::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, site: usize, mu: PauliIndex) {
        let (w, b) = (site / WORD, site % WORD);
        let (xb, zb) = mu.bits();
        self.x[w] = (self.x[w] & !(1 << b)) | ((xb as u64) << b);
        self.z[w] = (self.z[w] & !(1 << b)) | ((zb as u64) << b);
    }

    pub fn indices(&self) -> Vec<PauliIndex> {
        (0..self.n).map(|j| self.get(j)).collect()
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones() as usize).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Sites carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&j| self.get(j) != PauliIndex::I).collect()
    }

    /// True when every non-identity factor is `Z`.
    pub fn is_diagonal(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    fn y_count(&self) -> u32 {
        popcount_and(&self.x, &self.z)
    }

    /// Exponent in the `i^e X^x Z^z` form.
    fn xz_exp(&self) -> u32 {
        self.phase as u32 + self.y_count()
    }

    /// Group product `self · other`, exact including phase.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_len(self.n, other.n)?;
        let mut out = self.clone();
        out.mul_assign_unchecked(other);
        Ok(out)
    }

    pub(crate) fn mul_assign_unchecked(&mut self, other: &Self) {
        // X^a Z^b · X^c Z^d = (-1)^{b·c} X^{a⊕c} Z^{b⊕d}
        let exp = self.xz_exp() + other.xz_exp() + 2 * popcount_and(&self.z, &other.x);
        for (a, b) in self.x.iter_mut().zip(&other.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a ^= b;
        }
        let y = self.y_count();
        self.phase = ((exp + 4 * (y + 1) - y) % 4) as u8;
    }

    /// Multiply by `i^k`.
    pub fn times_i_pow(&mut self, k: u8) {
        self.phase = (self.phase + k) % 4;
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        check_len(self.n, other.n)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        let form: u32 = self
            .x
            .iter()
            .zip(&self.z)
            .zip(other.x.iter().zip(&other.z))
            .map(|((x1, z1), (x2, z2))| ((x1 & z2) ^ (z1 & x2)).count_ones())
            .sum();
        form % 2 == 0
    }

    /// Dense `2^n × 2^n` matrix, qubit 0 being the most significant bit.
    pub fn to_dense(&self) -> Result<CMatrix> {
        dense::check_cap(self.n)?;
        let dim = 1usize << self.n;
        let mut m = CMatrix::zeros(dim, dim);
        let idx = self.indices();
        let pre = i_pow(self.phase);
        for col in 0..dim {
            let mut row = 0usize;
            let mut amp = pre;
            for (j, mu) in idx.iter().enumerate() {
                let bit = (col >> (self.n - 1 - j)) & 1;
                let local = mu.matrix();
                let out = if mu.bits().0 { bit ^ 1 } else { bit };
                amp *= local[out][bit];
                row |= out << (self.n - 1 - j);
            }
            m[(row, col)] = amp;
        }
        Ok(m)
    }
}

/// `Tr(op · dense(p)) / 2^n`, the Pauli-basis coefficient of `op` along `p`.
pub fn pauli_coefficient(op: &CMatrix, p: &PauliString) -> Result<Complex64> {
    let dim = 1usize << p.num_qubits();
    if op.nrows() != dim || op.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: op.nrows() });
    }
    let pd = p.to_dense()?;
    let mut tr = Complex64::new(0.0, 0.0);
    for r in 0..dim {
        for c in 0..dim {
            tr += op[(r, c)] * pd[(c, r)];
        }
    }
    Ok(tr / dim as f64)
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["+", "+i", "-", "-i"][self.phase as usize];
        write!(f, "{prefix}")?;
        for j in 0..self.n {
            write!(f, "{}", self.get(j).letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional prefix in `{+, -, +i, -i}` (Unicode minus allowed)
    /// followed by letters from `{I, X, Y, Z}`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().replace('\u{2212}', "-");
        let (phase, body) = if let Some(rest) = s.strip_prefix("+i") {
            (1, rest)
        } else if let Some(rest) = s.strip_prefix("-i") {
            (3, rest)
        } else if let Some(rest) = s.strip_prefix('+') {
            (0, rest)
        } else if let Some(rest) = s.strip_prefix('-') {
            (2, rest)
        } else {
            (0, s.as_str())
        };
        if body.is_empty() {
            return Err(Error::Parse { line: 0, msg: format!("empty Pauli literal {s:?}") });
        }
        let indices = body
            .chars()
            .map(|c| {
                PauliIndex::from_letter(c)
                    .ok_or_else(|| Error::Parse { line: 0, msg: format!("bad Pauli letter {c:?}") })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PauliString::from_indices(&indices).with_phase(phase))
    }
}
