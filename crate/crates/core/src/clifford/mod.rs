//! Clifford gates, circuits and the stabilizer tableau.

mod sampling;
mod tableau;

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::dense::CMatrix;
use crate::error::{check_index, Error, Result};
use crate::pauli::{PauliIndex, PauliString};

pub use sampling::{
    brickwall_pairs, sample_brickwall, sample_brickwall_from, sample_u1_clifford,
    two_qubit_clifford_group, TwoQubitClifford, U1Clifford, TWO_QUBIT_CLIFFORD_ORDER,
};
pub use tableau::{CliffordTableau, Direction};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Kind {
    H,
    S,
    Sdg,
    X,
    Z,
    Cnot,
    Cz,
    Swap,
}

const KINDS: [Kind; 8] =
    [Kind::H, Kind::S, Kind::Sdg, Kind::X, Kind::Z, Kind::Cnot, Kind::Cz, Kind::Swap];

impl Kind {
    fn slot(self) -> usize {
        KINDS.iter().position(|&k| k == self).unwrap()
    }

    fn inverse(self) -> Kind {
        match self {
            Kind::S => Kind::Sdg,
            Kind::Sdg => Kind::S,
            k => k,
        }
    }

    fn matrix(self) -> CMatrix {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let m2 = |e: [Complex64; 4]| CMatrix::from_row_slice(2, 2, &e);
        let diag4 = |d: [Complex64; 4]| CMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&d));
        match self {
            Kind::H => m2([h, h, h, -h]),
            Kind::S => m2([l, o, o, i]),
            Kind::Sdg => m2([l, o, o, -i]),
            Kind::X => m2([o, l, l, o]),
            Kind::Z => m2([l, o, o, -l]),
            Kind::Cnot => CMatrix::from_row_slice(
                4,
                4,
                &[l, o, o, o, o, l, o, o, o, o, o, l, o, o, l, o],
            ),
            Kind::Cz => diag4([l, l, l, -l]),
            Kind::Swap => CMatrix::from_row_slice(
                4,
                4,
                &[l, o, o, o, o, o, l, o, o, l, o, o, o, o, o, l],
            ),
        }
    }

    fn is_two_qubit(self) -> bool {
        matches!(self, Kind::Cnot | Kind::Cz | Kind::Swap)
    }
}

/// Sign flag and new local labels for `g σ g†`, one entry per local Pauli.
type ConjTable = Vec<(bool, PauliIndex, PauliIndex)>;

fn local_pauli(mus: &[PauliIndex]) -> CMatrix {
    mus.iter()
        .map(|m| {
            let a = m.matrix();
            CMatrix::from_row_slice(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]])
        })
        .reduce(|acc, m| acc.kronecker(&m))
        .unwrap()
}

/// Derives the conjugation table of a gate from its dense matrix.
fn derive_table(kind: Kind) -> ConjTable {
    let u = kind.matrix();
    let arity = if kind.is_two_qubit() { 2 } else { 1 };
    let labels: Vec<Vec<PauliIndex>> = if arity == 1 {
        PauliIndex::ALL.iter().map(|&a| vec![a]).collect()
    } else {
        PauliIndex::ALL
            .iter()
            .flat_map(|&a| PauliIndex::ALL.iter().map(move |&b| vec![a, b]))
            .collect()
    };
    labels
        .iter()
        .map(|mus| {
            let image = &u * local_pauli(mus) * u.adjoint();
            labels
                .iter()
                .find_map(|cand| {
                    let c = local_pauli(cand);
                    if (&image - &c).norm() < 1e-12 {
                        Some((false, cand[0], *cand.get(1).unwrap_or(&PauliIndex::I)))
                    } else if (&image + &c).norm() < 1e-12 {
                        Some((true, cand[0], *cand.get(1).unwrap_or(&PauliIndex::I)))
                    } else {
                        None
                    }
                })
                .expect("Clifford gate maps Paulis to Paulis")
        })
        .collect()
}

fn table(kind: Kind) -> &'static ConjTable {
    static TABLES: OnceLock<Vec<ConjTable>> = OnceLock::new();
    &TABLES.get_or_init(|| KINDS.iter().map(|&k| derive_table(k)).collect())[kind.slot()]
}

impl Gate {
    fn kind(self) -> Kind {
        match self {
            Gate::H(_) => Kind::H,
            Gate::S(_) => Kind::S,
            Gate::Sdg(_) => Kind::Sdg,
            Gate::X(_) => Kind::X,
            Gate::Z(_) => Kind::Z,
            Gate::Cnot(..) => Kind::Cnot,
            Gate::Cz(..) => Kind::Cz,
            Gate::Swap(..) => Kind::Swap,
        }
    }

    /// `(first, second)` qubits; `second` is `None` for single-qubit gates.
    pub fn qubits(self) -> (usize, Option<usize>) {
        match self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Z(q) => (q, None),
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) => (a, Some(b)),
        }
    }

    pub fn is_two_qubit(self) -> bool {
        self.qubits().1.is_some()
    }

    pub fn name(self) -> &'static str {
        match self.kind() {
            Kind::H => "H",
            Kind::S => "S",
            Kind::Sdg => "SDG",
            Kind::X => "X",
            Kind::Z => "Z",
            Kind::Cnot => "CNOT",
            Kind::Cz => "CZ",
            Kind::Swap => "SWAP",
        }
    }

    pub fn inverse(self) -> Gate {
        match self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            g => g,
        }
    }

    /// Same gate kind on relabelled qubits.
    pub fn remap(self, f: impl Fn(usize) -> usize) -> Gate {
        match self {
            Gate::H(q) => Gate::H(f(q)),
            Gate::S(q) => Gate::S(f(q)),
            Gate::Sdg(q) => Gate::Sdg(f(q)),
            Gate::X(q) => Gate::X(f(q)),
            Gate::Z(q) => Gate::Z(f(q)),
            Gate::Cnot(a, b) => Gate::Cnot(f(a), f(b)),
            Gate::Cz(a, b) => Gate::Cz(f(a), f(b)),
            Gate::Swap(a, b) => Gate::Swap(f(a), f(b)),
        }
    }

    /// Dense 2×2 or 4×4 matrix; for two-qubit gates the first qubit is the
    /// more significant one.
    pub fn matrix(self) -> CMatrix {
        self.kind().matrix()
    }

    pub fn validate(self, n: usize) -> Result<()> {
        let (a, b) = self.qubits();
        check_index(a, n)?;
        if let Some(b) = b {
            check_index(b, n)?;
            if a == b {
                return Err(Error::RepeatedQubit(a));
            }
        }
        Ok(())
    }

    /// In-place `p ↦ g p g†` (or `g† p g` when `inverse`), touching only the
    /// gate's qubits.
    pub(crate) fn conjugate_in_place(self, p: &mut PauliString, inverse: bool) {
        let kind = if inverse { self.kind().inverse() } else { self.kind() };
        let tab = table(kind);
        let (a, b) = self.qubits();
        let (neg, na, nb) = match b {
            None => tab[p.get(a).value() as usize],
            Some(b) => tab[(p.get(a).value() * 4 + p.get(b).value()) as usize],
        };
        p.set(a, na);
        if let Some(b) = b {
            p.set(b, nb);
        }
        if neg {
            p.times_i_pow(2);
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qubits() {
            (a, None) => write!(f, "{} {a}", self.name()),
            (a, Some(b)) => write!(f, "{} {a} {b}", self.name()),
        }
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::Parse { line: 0, msg };
        let mut parts = s.split_whitespace();
        let name = parts.next().ok_or_else(|| bad("empty gate line".into()))?;
        let args = parts
            .map(|t| t.parse::<usize>().map_err(|_| bad(format!("bad qubit index {t:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let one = |make: fn(usize) -> Gate| match args[..] {
            [q] => Ok(make(q)),
            _ => Err(bad(format!("{name} takes one qubit"))),
        };
        let two = |make: fn(usize, usize) -> Gate| match args[..] {
            [a, b] => Ok(make(a, b)),
            _ => Err(bad(format!("{name} takes two qubits"))),
        };
        match name.to_ascii_uppercase().as_str() {
            "H" => one(Gate::H),
            "S" => one(Gate::S),
            "SDG" => one(Gate::Sdg),
            "X" => one(Gate::X),
            "Z" => one(Gate::Z),
            "CNOT" | "CX" => two(Gate::Cnot),
            "CZ" => two(Gate::Cz),
            "SWAP" => two(Gate::Swap),
            other => Err(bad(format!("unknown gate {other:?}"))),
        }
    }
}

/// Ordered list of Clifford gates on `n` qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordCircuit {
    n: usize,
    gates: Vec<Gate>,
}

impl CliffordCircuit {
    pub fn new(n: usize) -> Self {
        CliffordCircuit { n, gates: Vec::new() }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        gates.iter().try_for_each(|g| g.validate(n))?;
        Ok(CliffordCircuit { n, gates })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        g.validate(self.n)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &CliffordCircuit) -> Result<()> {
        crate::error::check_len(self.n, other.n)?;
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn inverse(&self) -> Self {
        CliffordCircuit { n: self.n, gates: self.gates.iter().rev().map(|g| g.inverse()).collect() }
    }

    pub fn tableau(&self) -> CliffordTableau {
        let mut t = CliffordTableau::identity(self.n);
        for &g in &self.gates {
            t.apply_gate_unchecked(g);
        }
        t
    }

    /// Dense unitary of the whole circuit.
    pub fn to_dense(&self) -> Result<CMatrix> {
        crate::dense::check_cap(self.n)?;
        let dim = 1usize << self.n;
        let mut cols = Vec::with_capacity(dim);
        for c in 0..dim {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[c] = Complex64::new(1.0, 0.0);
            let mut st = crate::dense::DenseState::from_amplitudes(self.n, amps)?;
            for &g in &self.gates {
                apply_gate_dense(&mut st, g)?;
            }
            cols.push(st.to_vector());
        }
        Ok(CMatrix::from_columns(&cols))
    }
}

pub fn apply_gate_dense(st: &mut crate::dense::DenseState, g: Gate) -> Result<()> {
    match g.qubits() {
        (a, None) => st.apply_1q(&g.matrix(), a),
        (a, Some(b)) => st.apply_2q(&g.matrix(), a, b),
    }
}

impl fmt::Display for CliffordCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n)?;
        for g in &self.gates {
            writeln!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for CliffordCircuit {
    type Err = Error;

    /// Header `qubits N`, then one gate per line; blank lines and `#` comments
    /// are ignored.
    fn from_str(s: &str) -> Result<Self> {
        let mut circuit: Option<CliffordCircuit> = None;
        for (k, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |e: Error| match e {
                Error::Parse { msg, .. } => Error::Parse { line: k + 1, msg },
                other => other,
            };
            match &mut circuit {
                None => {
                    let n = line
                        .strip_prefix("qubits")
                        .and_then(|r| r.trim().parse::<usize>().ok())
                        .ok_or(Error::Parse { line: k + 1, msg: "expected `qubits N` header".into() })?;
                    circuit = Some(CliffordCircuit::new(n));
                }
                Some(c) => {
                    let g: Gate = line.parse().map_err(at)?;
                    c.push(g).map_err(at)?;
                }
            }
        }
        circuit.ok_or(Error::Parse { line: 0, msg: "missing `qubits N` header".into() })
    }
}
