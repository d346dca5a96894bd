//! Clifford-conjugated rotation layers acting on an MPS.
//!
//! A circuit `R_M C_M ⋯ R_1 C_1` is rewritten as `𝒞 𝒯_M ⋯ 𝒯_1` with
//! `𝒞 = C_M ⋯ C_1` and `𝒯_m = (C_m⋯C_1)† R_m (C_m⋯C_1)`, each `𝒯_m` being a
//! rotation about a single Pauli string.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::clifford::{CliffordCircuit, CliffordTableau, Direction};
use crate::dense::CMatrix;
use crate::error::{check_index, check_len, Error, Result};
use crate::mps::{Mps, Truncation, TruncationPolicy};
use crate::pauli::{PauliIndex, PauliString};

type C = Complex64;

/// `exp(-i θ/2 σ^μ)` on one qubit.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct RotationGate {
    pub site: usize,
    pub axis: PauliIndex,
    pub theta: f64,
}

impl RotationGate {
    pub fn new(site: usize, axis: PauliIndex, theta: f64) -> Result<Self> {
        if axis == PauliIndex::I {
            return Err(Error::Config("rotation axis must be X, Y or Z".into()));
        }
        Ok(RotationGate { site, axis, theta })
    }

    /// `R^z(π/4)`, equal to the T gate up to the phase `e^{-iπ/8}`.
    pub fn t(site: usize) -> Self {
        RotationGate { site, axis: PauliIndex::Z, theta: std::f64::consts::FRAC_PI_4 }
    }

    pub fn matrix(&self) -> CMatrix {
        let (c, s) = ((self.theta / 2.0).cos(), (self.theta / 2.0).sin());
        let p = self.axis.matrix();
        CMatrix::from_fn(2, 2, |r, k| {
            let id = if r == k { C::new(c, 0.0) } else { C::new(0.0, 0.0) };
            id - C::new(0.0, s) * p[r][k]
        })
    }
}

/// `exp(-i θ/2 γ)` for a Hermitian Pauli string `γ` whose sign is kept in
/// its phase, so the effective angle about `|γ|` is `sign(γ)·θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabMpoLayer {
    pub gamma: PauliString,
    pub theta: f64,
}

impl StabMpoLayer {
    pub fn new(gamma: PauliString, theta: f64) -> Result<Self> {
        if !gamma.is_hermitian() {
            return Err(Error::NotHermitian(gamma.to_string()));
        }
        Ok(StabMpoLayer { gamma, theta })
    }

    pub fn sign(&self) -> f64 {
        if self.gamma.phase_exp() == 0 { 1.0 } else { -1.0 }
    }

    pub fn theta_eff(&self) -> f64 {
        self.sign() * self.theta
    }

    /// `(φ0, φ1) = (cos(θ_eff/2), -i sin(θ_eff/2))`
    pub fn phi(&self) -> (C, C) {
        let h = self.theta_eff() / 2.0;
        (C::new(h.cos(), 0.0), C::new(0.0, -h.sin()))
    }

    pub fn is_trivial(&self) -> bool {
        self.gamma.is_identity()
    }

    pub fn num_qubits(&self) -> usize {
        self.gamma.num_qubits()
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        let g = self.gamma.unsigned().to_dense()?;
        let (p0, p1) = self.phi();
        Ok(CMatrix::identity(g.nrows(), g.ncols()) * p0 + g * p1)
    }
}

/// Layers `𝒯_1 … 𝒯_M` plus the residual Clifford `𝒞`.
#[derive(Clone, Debug, PartialEq)]
pub struct StabMpoCircuit {
    layers: Vec<StabMpoLayer>,
    residual: CliffordTableau,
}

/// `C† R C` for the Clifford `C` held by `accumulated`.
pub fn conjugate_rotation(accumulated: &CliffordTableau, r: &RotationGate) -> Result<StabMpoLayer> {
    let n = accumulated.num_qubits();
    check_index(r.site, n)?;
    let sigma = PauliString::single(n, r.site, r.axis)?;
    let gamma = accumulated.conjugate(&sigma, Direction::Inverse)?;
    StabMpoLayer::new(gamma, r.theta)
}

/// `C† P C`
pub fn transform_observable(c: &CliffordTableau, p: &PauliString) -> Result<PauliString> {
    if !p.is_hermitian() {
        return Err(Error::NotHermitian(p.to_string()));
    }
    c.conjugate(p, Direction::Inverse)
}

/// Compiles `R_M C_M ⋯ R_1 C_1` given as `[(C_1, R_1), …, (C_M, R_M)]`.
pub fn compile(n: usize, sequence: &[(CliffordCircuit, RotationGate)]) -> Result<StabMpoCircuit> {
    let mut out = StabMpoCircuit::new(n);
    for (c, r) in sequence {
        out.push_block(c, r)?;
    }
    Ok(out)
}

impl StabMpoCircuit {
    pub fn new(n: usize) -> Self {
        StabMpoCircuit { layers: Vec::new(), residual: CliffordTableau::identity(n) }
    }

    /// Assembles a circuit from precomputed layers.
    pub fn from_parts(layers: Vec<StabMpoLayer>, residual: CliffordTableau) -> Result<Self> {
        for l in &layers {
            check_len(residual.num_qubits(), l.num_qubits())?;
        }
        Ok(StabMpoCircuit { layers, residual })
    }

    pub fn num_qubits(&self) -> usize {
        self.residual.num_qubits()
    }

    pub fn layers(&self) -> &[StabMpoLayer] {
        &self.layers
    }

    pub fn residual(&self) -> &CliffordTableau {
        &self.residual
    }

    /// Appends `R ∘ C` to the circuit.
    pub fn push_block(&mut self, c: &CliffordCircuit, r: &RotationGate) -> Result<&StabMpoLayer> {
        self.append_clifford(c)?;
        self.push_rotation(r)
    }

    pub fn push_rotation(&mut self, r: &RotationGate) -> Result<&StabMpoLayer> {
        let layer = conjugate_rotation(&self.residual, r)?;
        self.layers.push(layer);
        Ok(self.layers.last().expect("just pushed"))
    }

    /// Appends a Clifford after everything compiled so far.
    pub fn append_clifford(&mut self, c: &CliffordCircuit) -> Result<()> {
        check_len(self.num_qubits(), c.num_qubits())?;
        self.residual.apply_circuit(c)
    }

    /// The first `m` layers with the residual left unchanged.
    pub fn prefix(&self, m: usize) -> StabMpoCircuit {
        StabMpoCircuit { layers: self.layers[..m.min(self.layers.len())].to_vec(), residual: self.residual.clone() }
    }

    /// `𝒞 𝒯_M ⋯ 𝒯_1` as a dense matrix (global phase not tracked).
    pub fn to_dense(&self) -> Result<CMatrix> {
        let n = self.num_qubits();
        crate::dense::check_cap(n)?;
        let mut u = CMatrix::identity(1 << n, 1 << n);
        for l in &self.layers {
            u = l.to_dense()? * u;
        }
        Ok(tableau_to_dense(&self.residual)? * u)
    }
}

/// A dense unitary for `C`, fixed up to global phase: the column for `|0…0⟩`
/// is the +1 eigenvector of the images `C Z_j C†`, the others follow from
/// the `C X_j C†`.
pub fn tableau_to_dense(t: &CliffordTableau) -> Result<CMatrix> {
    let n = t.num_qubits();
    crate::dense::check_cap(n)?;
    let dim = 1usize << n;
    let mut proj = CMatrix::identity(dim, dim);
    for j in 0..n {
        let z = t.z_image(j).to_dense()?;
        proj = (CMatrix::identity(dim, dim) + z) * C::new(0.5, 0.0) * proj;
    }
    let col = (0..dim)
        .map(|k| proj.column(k).clone_owned())
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("non-empty");
    let v0 = col.clone() / C::new(col.norm(), 0.0);
    let xs: Vec<CMatrix> = (0..n).map(|j| t.x_image(j).to_dense()).collect::<Result<_>>()?;
    let mut u = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let mut v = v0.clone();
        for (j, x) in xs.iter().enumerate() {
            if (k >> (n - 1 - j)) & 1 == 1 {
                v = x * v;
            }
        }
        u.set_column(k, &v);
    }
    Ok(u)
}

/// Per-run bookkeeping for [`expectation`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub truncation: Vec<f64>,
    /// `1 - ∏(1 - ε_m)`
    pub cumulative_truncation: f64,
    pub max_bond: usize,
    /// Half-chain entropy in bits before the first layer and after each one.
    pub entropy: Vec<f64>,
}

/// `|ψ⟩ ← 𝒯|ψ⟩`, returning the truncation report. Trivial layers only
/// contribute a global phase.
pub fn apply_layer(psi: &mut Mps, layer: &StabMpoLayer, policy: &TruncationPolicy) -> Result<Truncation> {
    check_len(psi.num_sites(), layer.num_qubits())?;
    let (c, d) = layer.phi();
    if layer.is_trivial() {
        psi.scale(c + d);
        return Ok(Truncation { discarded_weight: 0.0, max_bond: psi.max_bond() });
    }
    psi.apply_pauli_combination(&layer.gamma.unsigned(), c, d, policy)
}

/// `⟨ψ|𝒯_1†⋯𝒯_M† Σ 𝒯_M⋯𝒯_1|ψ⟩` with `Σ = 𝒞† O 𝒞`.
pub fn expectation(
    psi0: &Mps,
    circuit: &StabMpoCircuit,
    observable: &PauliString,
    policy: &TruncationPolicy,
) -> Result<(f64, Diagnostics)> {
    let sigma = transform_observable(&circuit.residual, observable)?;
    let mut psi = psi0.clone();
    let mut diag = Diagnostics { max_bond: psi.max_bond(), ..Default::default() };
    diag.entropy.push(psi.half_chain_entropy()?);
    let mut kept = 1.0;
    for layer in &circuit.layers {
        let t = apply_layer(&mut psi, layer, policy)?;
        kept *= 1.0 - t.discarded_weight;
        diag.truncation.push(t.discarded_weight);
        diag.max_bond = diag.max_bond.max(t.max_bond);
        diag.entropy.push(psi.half_chain_entropy()?);
    }
    diag.cumulative_truncation = 1.0 - kept;
    Ok((psi.expect_pauli(&sigma)?, diag))
}

impl fmt::Display for StabMpoCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.num_qubits())?;
        writeln!(f, "layers {}", self.layers.len())?;
        for (m, l) in self.layers.iter().enumerate() {
            let sign = if l.sign() > 0.0 { "+1" } else { "-1" };
            writeln!(f, "LAYER {} {sign} {:e} {}", m + 1, l.theta, l.gamma)?;
        }
        writeln!(f, "RESIDUAL")?;
        for j in 0..self.num_qubits() {
            writeln!(f, "X{j} {}", self.residual.x_image(j))?;
            writeln!(f, "Z{j} {}", self.residual.z_image(j))?;
        }
        Ok(())
    }
}

impl FromStr for StabMpoCircuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let perr = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
        let mut header = |key: &str| -> Result<usize> {
            let (ln, l) = lines.next().ok_or_else(|| perr(0, &format!("missing `{key}` line")))?;
            l.strip_prefix(key)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| perr(ln, &format!("expected `{key} <count>`")))
        };
        let n = header("qubits")?;
        let m = header("layers")?;
        let mut layers = Vec::with_capacity(m);
        for k in 0..m {
            let (ln, l) = lines.next().ok_or_else(|| perr(0, "missing LAYER line"))?;
            let f: Vec<&str> = l.split_whitespace().collect();
            if f.len() != 5 || f[0] != "LAYER" {
                return Err(perr(ln, "expected `LAYER m sign theta gamma`"));
            }
            if f[1].parse::<usize>().ok() != Some(k + 1) {
                return Err(perr(ln, "layer index out of order"));
            }
            let theta: f64 = f[3].parse().map_err(|_| perr(ln, "bad angle"))?;
            let gamma: PauliString = f[4].parse().map_err(|_| perr(ln, "bad Pauli string"))?;
            check_len(n, gamma.num_qubits()).map_err(|e| perr(ln, &e.to_string()))?;
            let layer = StabMpoLayer::new(gamma, theta).map_err(|e| perr(ln, &e.to_string()))?;
            let sign: f64 = f[2].parse().map_err(|_| perr(ln, "bad sign"))?;
            if sign != layer.sign() {
                return Err(perr(ln, "sign disagrees with the Pauli string"));
            }
            layers.push(layer);
        }
        match lines.next() {
            Some((_, "RESIDUAL")) => {}
            Some((ln, _)) => return Err(perr(ln, "expected RESIDUAL")),
            None => return Err(perr(0, "missing RESIDUAL")),
        }
        let (mut xs, mut zs) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for j in 0..n {
            for (key, out) in [("X", &mut xs), ("Z", &mut zs)] {
                let (ln, l) = lines.next().ok_or_else(|| perr(0, "missing tableau image"))?;
                let (label, lit) = l.split_once(char::is_whitespace).ok_or_else(|| perr(ln, "expected `Xj image`"))?;
                if label != format!("{key}{j}") {
                    return Err(perr(ln, &format!("expected image of {key}{j}")));
                }
                let p: PauliString = lit.trim().parse().map_err(|_| perr(ln, "bad Pauli string"))?;
                check_len(n, p.num_qubits()).map_err(|e| perr(ln, &e.to_string()))?;
                out.push(p);
            }
        }
        if let Some((ln, _)) = lines.next() {
            return Err(perr(ln, "trailing content"));
        }
        let residual = CliffordTableau::from_forward_images(xs, zs)?;
        Ok(StabMpoCircuit { layers, residual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{apply_gate_dense, sample_brickwall, Gate};
    use crate::dense::{equal_up_to_phase, DenseState};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_clifford(n: usize, len: usize, rng: &mut impl Rng) -> CliffordCircuit {
        let mut c = CliffordCircuit::new(n);
        for _ in 0..len {
            let a = rng.gen_range(0..n);
            let g = match rng.gen_range(0..4) {
                0 => Gate::H(a),
                1 => Gate::S(a),
                _ if n > 1 => {
                    let b = (a + rng.gen_range(1..n)) % n;
                    Gate::Cnot(a, b)
                }
                _ => Gate::X(a),
            };
            c.push(g).unwrap();
        }
        c
    }

    fn random_rotation(n: usize, rng: &mut impl Rng) -> RotationGate {
        RotationGate::new(rng.gen_range(0..n), PauliIndex::new(rng.gen_range(1..4)).unwrap(), rng.gen_range(-PI..PI))
            .unwrap()
    }

    fn embed(u: &CMatrix, n: usize, site: usize) -> CMatrix {
        let left = CMatrix::identity(1 << site, 1 << site);
        let right = CMatrix::identity(1 << (n - 1 - site), 1 << (n - 1 - site));
        crate::dense::kron(&crate::dense::kron(&left, u), &right)
    }

    fn dense_sequence(n: usize, seq: &[(CliffordCircuit, RotationGate)]) -> CMatrix {
        let mut u = CMatrix::identity(1 << n, 1 << n);
        for (c, r) in seq {
            u = embed(&r.matrix(), n, r.site) * c.to_dense().unwrap() * u;
        }
        u
    }

    #[test]
    fn trivial_conjugations() {
        let id = CliffordTableau::identity(3);
        let l = conjugate_rotation(&id, &RotationGate::t(1)).unwrap();
        assert_eq!(l.gamma.to_string(), "+IZI");
        let h = CliffordCircuit::from_gates(3, vec![Gate::H(1)]).unwrap().tableau();
        assert_eq!(conjugate_rotation(&h, &RotationGate::t(1)).unwrap().gamma.to_string(), "+IXI");
        assert!(RotationGate::new(0, PauliIndex::I, 1.0).is_err());
        assert!(conjugate_rotation(&id, &RotationGate::t(3)).is_err());
    }

    #[test]
    fn layer_equals_conjugated_rotation_with_exact_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        // T = e^{iπ/8} R^z(π/4)
        let t_dense = CMatrix::from_row_slice(2, 2, &[C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::from_polar(1.0, PI / 4.0)]);
        let phase = C::from_polar(1.0, PI / 8.0);
        for _ in 0..20 {
            let c = random_clifford(3, 12, &mut rng);
            let cd = c.to_dense().unwrap();
            let layer = conjugate_rotation(&c.tableau(), &RotationGate::t(1)).unwrap();
            let want = cd.adjoint() * embed(&t_dense, 3, 1) * &cd;
            let got = layer.to_dense().unwrap() * phase;
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn compile_matches_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            for m in 0..=5 {
                let seq: Vec<_> =
                    (0..m).map(|_| (random_clifford(n, 8, &mut rng), random_rotation(n, &mut rng))).collect();
                let circ = compile(n, &seq).unwrap();
                assert_eq!(circ.layers().len(), m);
                assert!(equal_up_to_phase(&circ.to_dense().unwrap(), &dense_sequence(n, &seq), 1e-10));
            }
        }
    }

    #[test]
    fn compile_brickwall_t_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let seq: Vec<_> = (0..3)
            .map(|_| (sample_brickwall(4, 1, &mut rng).unwrap(), RotationGate::t(rng.gen_range(0..4))))
            .collect();
        let circ = compile(4, &seq).unwrap();
        assert!(equal_up_to_phase(&circ.to_dense().unwrap(), &dense_sequence(4, &seq), 1e-10));
        let acc = seq.iter().fold(CliffordTableau::identity(4), |mut t, (c, _)| {
            t.apply_circuit(c).unwrap();
            t
        });
        assert_eq!(circ.residual(), &acc);
    }

    #[test]
    fn tableau_dense_matches_circuit() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=4 {
            let c = random_clifford(n, 15, &mut rng);
            assert!(equal_up_to_phase(&tableau_to_dense(&c.tableau()).unwrap(), &c.to_dense().unwrap(), 1e-10));
        }
    }

    #[test]
    fn apply_layer_special_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 6;
        let d = DenseState::random(n, &mut rng).unwrap();
        let psi = Mps::from_dense(n, d.amplitudes()).unwrap();
        let gamma: PauliString = "-IXZYII".parse().unwrap();
        let policy = TruncationPolicy::exact();

        let mut a = psi.clone();
        apply_layer(&mut a, &StabMpoLayer::new(gamma.clone(), 0.0).unwrap(), &policy).unwrap();
        assert!(a.to_dense_state().unwrap().max_abs_diff(&d) < 1e-12);

        let mut b = psi.clone();
        apply_layer(&mut b, &StabMpoLayer::new(gamma.clone(), PI).unwrap(), &policy).unwrap();
        let mut want = d.clone();
        want.apply_pauli(&gamma.unsigned()).unwrap();
        // θ_eff = -π: cos(-π/2) I - i sin(-π/2) |γ| = +i |γ|
        want.scale(C::new(0.0, 1.0));
        assert!(b.to_dense_state().unwrap().max_abs_diff(&want) < 1e-12);
        for cut in 0..=n {
            assert!((b.entanglement_entropy(cut).unwrap() - d.entropy(cut)).abs() < 1e-9);
        }

        let mut c = psi.clone();
        apply_layer(&mut c, &StabMpoLayer::new(PauliString::identity(n), 0.7).unwrap(), &policy).unwrap();
        let mut want = d.clone();
        want.scale(C::from_polar(1.0, -0.35));
        assert!(c.to_dense_state().unwrap().max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn random_layer_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let n = 6;
        for _ in 0..10 {
            let d = DenseState::random(n, &mut rng).unwrap();
            let mut psi = Mps::from_dense(n, d.amplitudes()).unwrap();
            let c = random_clifford(n, 30, &mut rng);
            let layer = conjugate_rotation(&c.tableau(), &random_rotation(n, &mut rng)).unwrap();
            let t = apply_layer(&mut psi, &layer, &TruncationPolicy::exact()).unwrap();
            assert!(t.discarded_weight < 1e-12);
            let want = layer.to_dense().unwrap() * d.to_vector();
            let want = DenseState::from_amplitudes(n, want.iter().copied().collect()).unwrap();
            assert!(psi.to_dense_state().unwrap().max_abs_diff(&want) < 1e-10);
            assert!((psi.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn expectation_matches_dense_simulation() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for (n, m) in [(2, 3), (4, 5), (6, 4)] {
            let seq: Vec<_> =
                (0..m).map(|_| (random_clifford(n, 20, &mut rng), RotationGate::t(rng.gen_range(0..n)))).collect();
            let circ = compile(n, &seq).unwrap();
            let mut d = DenseState::zeros_state(n).unwrap();
            for (c, r) in &seq {
                for &g in c.gates() {
                    apply_gate_dense(&mut d, g).unwrap();
                }
                d.apply_1q(&r.matrix(), r.site).unwrap();
            }
            let obs = PauliString::single(n, n / 2, PauliIndex::Z).unwrap();
            let psi0 = Mps::product_state(&vec![0; n]);
            let (val, diag) = expectation(&psi0, &circ, &obs, &TruncationPolicy::exact()).unwrap();
            assert!((val - d.expect_pauli(&obs).unwrap().re).abs() < 1e-8);
            assert_eq!(diag.entropy.len(), m + 1);
            assert!(diag.cumulative_truncation < 1e-10);
        }
    }

    #[test]
    fn clifford_only_expectation_is_stabilizer_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 6;
        for _ in 0..10 {
            let c = random_clifford(n, 40, &mut rng);
            let mut circ = StabMpoCircuit::new(n);
            circ.append_clifford(&c).unwrap();
            let obs = PauliString::single(n, n / 2, PauliIndex::Z).unwrap();
            let sigma = transform_observable(circ.residual(), &obs).unwrap();
            let want = if sigma.is_diagonal() { sigma.sign().unwrap() } else { 0.0 };
            let (val, _) =
                expectation(&Mps::product_state(&[0; 6]), &circ, &obs, &TruncationPolicy::with_chi(4)).unwrap();
            assert_eq!(val, want);
        }
    }

    #[test]
    fn zero_angles_reduce_to_clifford_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 5;
        let seq: Vec<_> = (0..4)
            .map(|_| {
                let mut r = random_rotation(n, &mut rng);
                r.theta = 0.0;
                (random_clifford(n, 10, &mut rng), r)
            })
            .collect();
        let circ = compile(n, &seq).unwrap();
        let obs: PauliString = "ZIIIZ".parse().unwrap();
        let psi0 = Mps::product_state(&[0; 5]);
        let (v, _) = expectation(&psi0, &circ, &obs, &TruncationPolicy::exact()).unwrap();
        let (w, _) = expectation(&psi0, &circ.prefix(0), &obs, &TruncationPolicy::exact()).unwrap();
        assert!((v - w).abs() < 1e-12);
    }

    #[test]
    fn serialization_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 5;
        let seq: Vec<_> = (0..6).map(|_| (random_clifford(n, 15, &mut rng), random_rotation(n, &mut rng))).collect();
        let circ = compile(n, &seq).unwrap();
        let text = circ.to_string();
        let back: StabMpoCircuit = text.parse().unwrap();
        assert_eq!(back, circ);
        let broken = text.replacen("LAYER 2", "LAYER 3", 1);
        assert!(matches!(broken.parse::<StabMpoCircuit>(), Err(Error::Parse { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn layer_inverse_restores_state(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 5;
            let d = DenseState::random(n, &mut rng).unwrap();
            let psi = Mps::from_dense(n, d.amplitudes()).unwrap();
            let c = random_clifford(n, 20, &mut rng);
            let layer = conjugate_rotation(&c.tableau(), &random_rotation(n, &mut rng)).unwrap();
            let back = StabMpoLayer::new(layer.gamma.clone(), -layer.theta).unwrap();
            let mut phi = psi.clone();
            apply_layer(&mut phi, &layer, &TruncationPolicy::exact()).unwrap();
            apply_layer(&mut phi, &back, &TruncationPolicy::exact()).unwrap();
            let f = psi.inner(&phi).unwrap().norm_sqr();
            prop_assert!(f > 1.0 - 1e-10);
        }

        #[test]
        fn transform_round_trip(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 6;
            let t = random_clifford(n, 25, &mut rng).tableau();
            let idx: Vec<PauliIndex> = (0..n).map(|_| PauliIndex::new(rng.gen_range(0..4)).unwrap()).collect();
            let p = PauliString::from_indices(&idx);
            let q = transform_observable(&t, &p).unwrap();
            prop_assert_eq!(t.conjugate(&q, Direction::Forward).unwrap(), p);
        }
    }
}
