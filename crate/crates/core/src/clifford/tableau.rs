use crate::error::{check_len, Error, Result};
use crate::pauli::{PauliIndex, PauliString};

use super::{CliffordCircuit, Gate};

/// Which way to push a Pauli through the Clifford `C`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `C P C†`
    Forward,
    /// `C† P C`
    Inverse,
}

/// Images of the `2n` generators `X_j`, `Z_j` under `P ↦ C P C†`, kept
/// together with the images under the inverse map so both conjugation
/// directions cost the same.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliffordTableau {
    n: usize,
    fwd_x: Vec<PauliString>,
    fwd_z: Vec<PauliString>,
    inv_x: Vec<PauliString>,
    inv_z: Vec<PauliString>,
}

fn generators(n: usize, mu: PauliIndex) -> Vec<PauliString> {
    (0..n).map(|j| PauliString::single(n, j, mu).unwrap()).collect()
}

/// Pushes `p` through the map whose generator images are `(xs, zs)`.
fn push_through(xs: &[PauliString], zs: &[PauliString], p: &PauliString) -> PauliString {
    let n = p.num_qubits();
    let mut out = PauliString::identity(n).with_phase(p.phase_exp());
    for j in 0..n {
        match p.get(j) {
            PauliIndex::X => out.mul_assign_unchecked(&xs[j]),
            PauliIndex::Z => out.mul_assign_unchecked(&zs[j]),
            PauliIndex::Y => {
                // Y = i X Z
                out.mul_assign_unchecked(&xs[j]);
                out.mul_assign_unchecked(&zs[j]);
                out.times_i_pow(1);
            }
            _ => {}
        }
    }
    out
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        CliffordTableau {
            n,
            fwd_x: generators(n, PauliIndex::X),
            fwd_z: generators(n, PauliIndex::Z),
            inv_x: generators(n, PauliIndex::X),
            inv_z: generators(n, PauliIndex::Z),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// `C X_j C†`
    pub fn x_image(&self, j: usize) -> &PauliString {
        &self.fwd_x[j]
    }

    /// `C Z_j C†`
    pub fn z_image(&self, j: usize) -> &PauliString {
        &self.fwd_z[j]
    }

    /// Builds a tableau from forward images, recovering the inverse map from
    /// the symplectic structure.
    pub fn from_forward_images(xs: Vec<PauliString>, zs: Vec<PauliString>) -> Result<Self> {
        let n = xs.len();
        check_len(n, zs.len())?;
        for p in xs.iter().chain(&zs) {
            check_len(n, p.num_qubits())?;
            if !p.is_hermitian() {
                return Err(Error::NotHermitian(p.to_string()));
            }
        }
        let mut t = CliffordTableau {
            n,
            fwd_x: xs,
            fwd_z: zs,
            inv_x: Vec::with_capacity(n),
            inv_z: Vec::with_capacity(n),
        };
        if !t.forward_is_symplectic() {
            return Err(Error::Parse { line: 0, msg: "images violate the symplectic condition".into() });
        }
        // For a symplectic map F, the coefficient of X_k in F^{-1}(G) is
        // ω(G, F(Z_k)) and that of Z_k is ω(G, F(X_k)).
        for target in [PauliIndex::X, PauliIndex::Z] {
            for j in 0..n {
                let g = PauliString::single(n, j, target).unwrap();
                let mut w = PauliString::identity(n);
                for k in 0..n {
                    let xk = !g.commutes_unchecked(&t.fwd_z[k]);
                    let zk = !g.commutes_unchecked(&t.fwd_x[k]);
                    w.set(k, PauliIndex::from_bits(xk, zk));
                }
                let image = push_through(&t.fwd_x, &t.fwd_z, &w);
                debug_assert_eq!(image.unsigned(), g);
                if image.phase_exp() == 2 {
                    w.times_i_pow(2);
                }
                match target {
                    PauliIndex::X => t.inv_x.push(w),
                    _ => t.inv_z.push(w),
                }
            }
        }
        Ok(t)
    }

    pub fn from_circuit(c: &CliffordCircuit) -> Self {
        c.tableau()
    }

    /// The tableau of `C†`.
    pub fn inverse(&self) -> Self {
        CliffordTableau {
            n: self.n,
            fwd_x: self.inv_x.clone(),
            fwd_z: self.inv_z.clone(),
            inv_x: self.fwd_x.clone(),
            inv_z: self.fwd_z.clone(),
        }
    }

    /// Updates the tableau from `C` to `g ∘ C`.
    pub fn apply_gate(&mut self, g: Gate) -> Result<()> {
        g.validate(self.n)?;
        self.apply_gate_unchecked(g);
        Ok(())
    }

    pub(crate) fn apply_gate_unchecked(&mut self, g: Gate) {
        for p in self.fwd_x.iter_mut().chain(self.fwd_z.iter_mut()) {
            g.conjugate_in_place(p, false);
        }
        // (gC)† G (gC) = C† (g† G g) C; only generators on the gate's qubits move.
        let (a, b) = g.qubits();
        let mut updates = Vec::with_capacity(4);
        for q in std::iter::once(a).chain(b) {
            for mu in [PauliIndex::X, PauliIndex::Z] {
                let mut local = PauliString::single(self.n, q, mu).unwrap();
                g.conjugate_in_place(&mut local, true);
                updates.push((q, mu, push_through(&self.inv_x, &self.inv_z, &local)));
            }
        }
        for (q, mu, img) in updates {
            match mu {
                PauliIndex::X => self.inv_x[q] = img,
                _ => self.inv_z[q] = img,
            }
        }
        debug_assert!(self.n > 24 || self.is_symplectic(), "symplectic invariant broken by {g}");
    }

    /// Appends every gate of `c` (so the result is `c ∘ self`).
    pub fn apply_circuit(&mut self, c: &CliffordCircuit) -> Result<()> {
        check_len(self.n, c.num_qubits())?;
        for &g in c.gates() {
            self.apply_gate_unchecked(g);
        }
        Ok(())
    }

    /// `C P C†` or `C† P C`, sign carried in the phase.
    pub fn conjugate(&self, p: &PauliString, direction: Direction) -> Result<PauliString> {
        check_len(self.n, p.num_qubits())?;
        Ok(match direction {
            Direction::Forward => push_through(&self.fwd_x, &self.fwd_z, p),
            Direction::Inverse => push_through(&self.inv_x, &self.inv_z, p),
        })
    }

    fn forward_is_symplectic(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let anti = i == j;
                if self.fwd_x[i].commutes_unchecked(&self.fwd_z[j]) == anti {
                    return false;
                }
                if j > i
                    && (!self.fwd_x[i].commutes_unchecked(&self.fwd_x[j])
                        || !self.fwd_z[i].commutes_unchecked(&self.fwd_z[j]))
                {
                    return false;
                }
            }
        }
        self.fwd_x.iter().chain(&self.fwd_z).all(|p| p.is_hermitian())
    }

    /// Images pairwise obey the generator (anti)commutation pattern, carry
    /// real signs, and the inverse images really invert the forward map.
    pub fn is_symplectic(&self) -> bool {
        if !self.forward_is_symplectic() {
            return false;
        }
        (0..self.n).all(|j| {
            let x = PauliString::single(self.n, j, PauliIndex::X).unwrap();
            let z = PauliString::single(self.n, j, PauliIndex::Z).unwrap();
            push_through(&self.fwd_x, &self.fwd_z, &self.inv_x[j]) == x
                && push_through(&self.fwd_x, &self.fwd_z, &self.inv_z[j]) == z
        })
    }

    pub fn is_identity(&self) -> bool {
        *self == CliffordTableau::identity(self.n)
    }
}
