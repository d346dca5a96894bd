//! Random Clifford samplers: brick-wall circuits of uniform two-qubit
//! Cliffords, and magnetization-preserving (U(1)) Cliffords.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

use super::{CliffordCircuit, CliffordTableau, Gate};

/// Order of the two-qubit Clifford group modulo global phase.
pub const TWO_QUBIT_CLIFFORD_ORDER: usize = 11520;

/// One element of the two-qubit Clifford group, as a word in `{H, S, CNOT}`
/// on local qubits 0 and 1.
#[derive(Clone, Debug)]
pub struct TwoQubitClifford {
    gates: Vec<Gate>,
    key: Vec<PauliString>,
}

impl TwoQubitClifford {
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Gates placed on `(a, b)`, local qubit 0 mapping to `a`.
    pub fn placed(&self, a: usize, b: usize) -> impl Iterator<Item = Gate> + '_ {
        self.gates.iter().map(move |g| g.remap(|q| if q == 0 { a } else { b }))
    }

    /// Canonical form: the signed forward images of `X0, Z0, X1, Z1`.
    pub fn canonical_key(&self) -> &[PauliString] {
        &self.key
    }
}

fn tableau_key(t: &CliffordTableau) -> Vec<PauliString> {
    (0..t.num_qubits()).flat_map(|j| [t.x_image(j).clone(), t.z_image(j).clone()]).collect()
}

/// Exhaustive enumeration of the two-qubit Clifford group by a cheapest-first
/// search over tableaus, deduplicated by canonical key. A CNOT costs far more
/// than a single-qubit gate, so each element keeps a word with the fewest
/// CNOTs (then the fewest gates) found.
pub fn two_qubit_clifford_group() -> &'static [TwoQubitClifford] {
    static GROUP: OnceLock<Vec<TwoQubitClifford>> = OnceLock::new();
    GROUP.get_or_init(|| {
        const CNOT_COST: usize = 64;
        let generators = [
            Gate::H(0),
            Gate::H(1),
            Gate::S(0),
            Gate::S(1),
            Gate::Cnot(0, 1),
            Gate::Cnot(1, 0),
        ];
        let start = CliffordTableau::identity(2);
        let mut done: HashSet<Vec<PauliString>> = HashSet::new();
        let mut elems = Vec::with_capacity(TWO_QUBIT_CLIFFORD_ORDER);
        // (cost, tie-break counter) keeps the order deterministic
        let mut heap = BinaryHeap::new();
        let mut pending: Vec<(CliffordTableau, Vec<Gate>)> = vec![(start, vec![])];
        heap.push(Reverse((0usize, 0usize)));
        while let Some(Reverse((cost, slot))) = heap.pop() {
            let (t, word) = std::mem::replace(&mut pending[slot], (CliffordTableau::identity(0), vec![]));
            let key = tableau_key(&t);
            if !done.insert(key.clone()) {
                continue;
            }
            for g in generators {
                let mut next = t.clone();
                next.apply_gate_unchecked(g);
                if done.contains(&tableau_key(&next)) {
                    continue;
                }
                let mut w = word.clone();
                w.push(g);
                let step = if g.is_two_qubit() { CNOT_COST } else { 1 };
                heap.push(Reverse((cost + step, pending.len())));
                pending.push((next, w));
            }
            elems.push(TwoQubitClifford { gates: word, key });
        }
        assert_eq!(elems.len(), TWO_QUBIT_CLIFFORD_ORDER);
        elems
    })
}

/// Pairs acted on by brick-wall sublayer `k` (1-based): odd `k` pairs
/// `(0,1), (2,3), …`, even `k` pairs `(1,2), (3,4), …`; open boundaries, a
/// leftover qubit idles.
pub fn brickwall_pairs(n: usize, k: usize) -> Vec<(usize, usize)> {
    let offset = if k % 2 == 1 { 0 } else { 1 };
    (offset..n.saturating_sub(1)).step_by(2).map(|a| (a, a + 1)).collect()
}

/// `depth` brick-wall sublayers starting at sublayer 1, each pair receiving an
/// independent uniform two-qubit Clifford.
pub fn sample_brickwall(n: usize, depth: usize, rng: &mut impl Rng) -> Result<CliffordCircuit> {
    sample_brickwall_from(n, depth, 1, rng)
}

/// As [`sample_brickwall`] but starting at sublayer `first`, so consecutive
/// blocks of a longer circuit keep the alternating pattern.
pub fn sample_brickwall_from(
    n: usize,
    depth: usize,
    first: usize,
    rng: &mut impl Rng,
) -> Result<CliffordCircuit> {
    if n < 2 {
        return Err(Error::Config(format!("brick-wall circuit needs n >= 2, got {n}")));
    }
    if depth == 0 || first == 0 {
        return Err(Error::Config("brick-wall depth and first sublayer must be >= 1".into()));
    }
    let group = two_qubit_clifford_group();
    let mut c = CliffordCircuit::new(n);
    for k in first..first + depth {
        for (a, b) in brickwall_pairs(n, k) {
            let elem = &group[rng.gen_range(0..group.len())];
            for g in elem.placed(a, b) {
                c.push(g)?;
            }
        }
    }
    Ok(c)
}

/// A random magnetization-preserving Clifford
/// `C = (∏_{i<j} CZ_{ij}^{ν_ij}) (∏_j S_j^{μ_j}) P_π` with zero global phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct U1Clifford {
    /// `P Z_j P† = Z_{π(j)}`.
    pub permutation: Vec<usize>,
    pub s_powers: Vec<u8>,
    pub cz_pairs: Vec<(usize, usize)>,
}

impl U1Clifford {
    pub fn sample(n: usize, rng: &mut impl Rng) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("U(1) Clifford needs n >= 1".into()));
        }
        let mut permutation: Vec<usize> = (0..n).collect();
        permutation.shuffle(rng);
        let s_powers = (0..n).map(|_| rng.gen_range(0..4u8)).collect();
        let mut cz_pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen::<bool>() {
                    cz_pairs.push((i, j));
                }
            }
        }
        Ok(U1Clifford { permutation, s_powers, cz_pairs })
    }

    pub fn num_qubits(&self) -> usize {
        self.permutation.len()
    }

    /// Gate list: permutation as SWAPs first, then phase gates, then CZs.
    pub fn circuit(&self) -> CliffordCircuit {
        let n = self.num_qubits();
        let mut gates = Vec::new();
        // content[p] = original qubit currently sitting at position p
        let mut content: Vec<usize> = (0..n).collect();
        let mut position: Vec<usize> = (0..n).collect();
        let mut wanted = vec![0; n];
        for (j, &t) in self.permutation.iter().enumerate() {
            wanted[t] = j;
        }
        for t in 0..n {
            let j = wanted[t];
            let p = position[j];
            if p != t {
                gates.push(Gate::Swap(t, p));
                let other = content[t];
                content.swap(t, p);
                position[j] = t;
                position[other] = p;
            }
        }
        for (j, &mu) in self.s_powers.iter().enumerate() {
            match mu % 4 {
                1 => gates.push(Gate::S(j)),
                2 => gates.push(Gate::Z(j)),
                3 => gates.push(Gate::Sdg(j)),
                _ => {}
            }
        }
        gates.extend(self.cz_pairs.iter().map(|&(i, j)| Gate::Cz(i, j)));
        CliffordCircuit::from_gates(n, gates).expect("indices are in range by construction")
    }
}

pub fn sample_u1_clifford(n: usize, rng: &mut impl Rng) -> Result<CliffordCircuit> {
    Ok(U1Clifford::sample(n, rng)?.circuit())
}
