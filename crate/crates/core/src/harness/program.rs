use std::fmt;
use std::str::FromStr;

use crate::clifford::{apply_gate_dense, CliffordCircuit, Gate};
use crate::dense::{kron, CMatrix, DenseState};
use crate::error::{check_index, check_len, Error, Result};
use crate::mps::{Mps, Truncation, TruncationPolicy};
use crate::pauli::{PauliIndex, PauliString};
use crate::stab_mpo::{RotationGate, StabMpoCircuit};

/// A Clifford followed by single-qubit rotations.
#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub clifford: CliffordCircuit,
    pub rotations: Vec<RotationGate>,
}

/// A Clifford+rotation circuit, grouped into blocks; trajectories are
/// recorded once per block.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    n: usize,
    blocks: Vec<Block>,
}

impl Program {
    pub fn new(n: usize) -> Self {
        Program { n, blocks: Vec::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn push_block(&mut self, clifford: CliffordCircuit, rotations: Vec<RotationGate>) -> Result<()> {
        check_len(self.n, clifford.num_qubits())?;
        for r in &rotations {
            check_index(r.site, self.n)?;
        }
        self.blocks.push(Block { clifford, rotations });
        Ok(())
    }

    pub fn num_rotations(&self) -> usize {
        self.blocks.iter().map(|b| b.rotations.len()).sum()
    }

    /// Stabilizer-MPO form of the whole program.
    pub fn compile(&self) -> Result<StabMpoCircuit> {
        let mut c = StabMpoCircuit::new(self.n);
        for b in &self.blocks {
            c.append_clifford(&b.clifford)?;
            for r in &b.rotations {
                c.push_rotation(r)?;
            }
        }
        Ok(c)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n)?;
        for b in &self.blocks {
            for g in b.clifford.gates() {
                writeln!(f, "{g}")?;
            }
            for r in &b.rotations {
                writeln!(f, "R{} {} {:e}", r.axis.letter(), r.site, r.theta)?;
            }
        }
        Ok(())
    }
}

impl FromStr for Program {
    type Err = Error;

    /// `qubits N`, then Clifford gate lines, `RX|RY|RZ q theta` and `T q`.
    /// Each maximal run of Cliffords followed by rotations forms one block.
    fn from_str(s: &str) -> Result<Self> {
        let mut prog: Option<Program> = None;
        let mut cliff = Vec::new();
        let mut rots = Vec::new();
        for (k, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let ln = k + 1;
            let perr = |msg: String| Error::Parse { line: ln, msg };
            let Some(p) = prog.as_mut() else {
                let n = line
                    .strip_prefix("qubits")
                    .and_then(|r| r.trim().parse::<usize>().ok())
                    .ok_or_else(|| perr("expected `qubits N` header".into()))?;
                prog = Some(Program::new(n));
                continue;
            };
            let f: Vec<&str> = line.split_whitespace().collect();
            let head = f[0].to_ascii_uppercase();
            let rotation = match head.as_str() {
                "T" => {
                    let q = f.get(1).and_then(|t| t.parse().ok()).filter(|_| f.len() == 2);
                    Some(RotationGate::t(q.ok_or_else(|| perr("expected `T q`".into()))?))
                }
                "RX" | "RY" | "RZ" => {
                    if f.len() != 3 {
                        return Err(perr(format!("expected `{head} q theta`")));
                    }
                    let q = f[1].parse().map_err(|_| perr(format!("bad qubit {:?}", f[1])))?;
                    let th = f[2].parse().map_err(|_| perr(format!("bad angle {:?}", f[2])))?;
                    let axis = PauliIndex::from_letter(head.chars().nth(1).unwrap()).expect("X, Y or Z");
                    Some(RotationGate::new(q, axis, th)?)
                }
                _ => None,
            };
            match rotation {
                Some(r) => {
                    check_index(r.site, p.n).map_err(|e| perr(e.to_string()))?;
                    rots.push(r);
                }
                None => {
                    if !rots.is_empty() {
                        let c = CliffordCircuit::from_gates(p.n, std::mem::take(&mut cliff))?;
                        p.push_block(c, std::mem::take(&mut rots))?;
                    }
                    let g: Gate = line.parse().map_err(|e| match e {
                        Error::Parse { msg, .. } => perr(msg),
                        other => other,
                    })?;
                    g.validate(p.n).map_err(|e| perr(e.to_string()))?;
                    cliff.push(g);
                }
            }
        }
        let mut p = prog.ok_or(Error::Parse { line: 0, msg: "missing `qubits N` header".into() })?;
        if !cliff.is_empty() || !rots.is_empty() {
            let c = CliffordCircuit::from_gates(p.n, cliff)?;
            p.push_block(c, rots)?;
        }
        Ok(p)
    }
}

/// Full statevector simulation of `program` from `|bits⟩`, returning the
/// state after each block (index 0 is the initial state).
pub fn dense_oracle_run(program: &Program, bits: &[u8]) -> Result<Vec<DenseState>> {
    check_len(program.n, bits.len())?;
    let mut st = DenseState::product(bits)?;
    let mut out = vec![st.clone()];
    for b in &program.blocks {
        for &g in b.clifford.gates() {
            apply_gate_dense(&mut st, g)?;
        }
        for r in &b.rotations {
            st.apply_1q(&r.matrix(), r.site)?;
        }
        out.push(st.clone());
    }
    Ok(out)
}

/// Mean of `⟨O⟩` over `observables` for a dense state.
pub fn dense_mean_expectation(st: &DenseState, observables: &[PauliString]) -> Result<f64> {
    let mut acc = 0.0;
    for o in observables {
        acc += st.expect_pauli(o)?.re;
    }
    Ok(acc / observables.len() as f64)
}

fn swap_matrix() -> CMatrix {
    Gate::Swap(0, 1).matrix()
}

/// Applies a 4×4 unitary on `(a, b)` (`a` the more significant local index)
/// through nearest-neighbour gates, routing with SWAPs when `|a − b| > 1`.
pub fn apply_two_qubit(psi: &mut Mps, u: &CMatrix, a: usize, b: usize, policy: &TruncationPolicy) -> Result<Truncation> {
    let n = psi.num_sites();
    check_index(a, n)?;
    check_index(b, n)?;
    if a == b {
        return Err(Error::RepeatedQubit(a));
    }
    let mut kept = 1.0;
    let mut step = |psi: &mut Mps, m: &CMatrix, site: usize| -> Result<()> {
        let t = psi.apply_2q_gate(m, site, policy)?;
        kept *= 1.0 - t.discarded_weight;
        Ok(())
    };
    let (lo, hi) = (a.min(b), a.max(b));
    // move the qubit at `hi` down to `lo + 1`
    for s in (lo + 1..hi).rev() {
        step(psi, &swap_matrix(), s)?;
    }
    let local = if a < b { u.clone() } else { swap_matrix() * u * swap_matrix() };
    step(psi, &local, lo)?;
    for s in lo + 1..hi {
        step(psi, &swap_matrix(), s)?;
    }
    Ok(Truncation { discarded_weight: 1.0 - kept, max_bond: psi.max_bond() })
}

enum Pending {
    None,
    Pair(usize, usize, CMatrix),
}

/// Applies a Clifford gate list to an MPS. Consecutive gates confined to the
/// same qubit pair are merged into one 4×4 unitary before the SVD step, so a
/// sampled two-qubit Clifford costs one two-site update.
pub fn apply_clifford_mps(psi: &mut Mps, c: &CliffordCircuit, policy: &TruncationPolicy) -> Result<Truncation> {
    let mut kept = 1.0;
    let mut pending = Pending::None;
    let flush = |psi: &mut Mps, p: &mut Pending, kept: &mut f64| -> Result<()> {
        if let Pending::Pair(a, b, u) = std::mem::replace(p, Pending::None) {
            let t = apply_two_qubit(psi, &u, a, b, policy)?;
            *kept *= 1.0 - t.discarded_weight;
        }
        Ok(())
    };
    let id2 = CMatrix::identity(2, 2);
    for &g in c.gates() {
        match (g.qubits(), &mut pending) {
            ((q, None), Pending::Pair(a, b, u)) if q == *a || q == *b => {
                let lifted = if q == *a { kron(&g.matrix(), &id2) } else { kron(&id2, &g.matrix()) };
                *u = lifted * &*u;
            }
            ((q, None), _) => {
                flush(psi, &mut pending, &mut kept)?;
                psi.apply_1q_gate(&g.matrix(), q)?;
            }
            ((x, Some(y)), Pending::Pair(a, b, u)) if (x, y) == (*a, *b) || (y, x) == (*a, *b) => {
                let m = if (x, y) == (*a, *b) { g.matrix() } else { swap_matrix() * g.matrix() * swap_matrix() };
                *u = m * &*u;
            }
            ((x, Some(y)), _) => {
                flush(psi, &mut pending, &mut kept)?;
                pending = Pending::Pair(x, y, g.matrix());
            }
        }
    }
    flush(psi, &mut pending, &mut kept)?;
    Ok(Truncation { discarded_weight: 1.0 - kept, max_bond: psi.max_bond() })
}
