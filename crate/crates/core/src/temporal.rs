//! The two-dimensional network behind a stabilizer-MPO expectation value.
//!
//! Rows are layers, columns are physical sites. In the folded (Pauli-basis)
//! picture each layer `φ0 I + φ1 |γ|` acting on `ρ = ⊗_j Σ_μ y_j^μ σ^μ`
//! becomes, per site, a 4×4 map `W[A]` labelled by the auxiliary pair
//! `A = (a, b) ∈ {00, 01, 10, 11}` and weighted by `φ_a φ_b*`.
//!
//! The network can be contracted row by row ([`vertical_fold_evolve`]) or
//! column by column ([`horizontal_contract`]), the latter carrying an MPS
//! over the auxiliary indices whose entanglement is the temporal entropy.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{check_len, Error, Result};
use crate::mps::{Mpo, MpoSite, Mps, TruncationPolicy};
use crate::pauli::{i_pow, PauliIndex, PauliString};
use crate::stab_mpo::{transform_observable, StabMpoCircuit, StabMpoLayer};

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// Relative norm drop below which a contraction is reported as collapsed.
pub const COLLAPSE_THRESHOLD: f64 = 1e-12;

/// `½ Tr(σ^μ σ^ν σ^g)`
pub fn gamma_structure(mu: PauliIndex, nu: PauliIndex, g: PauliIndex) -> C {
    if mu.xor(nu) != g {
        return ZERO;
    }
    let p = PauliString::from_indices(&[mu]);
    let q = PauliString::from_indices(&[nu]);
    i_pow(p.mul(&q).expect("same length").phase_exp())
}

/// `½ Tr(σ^μ σ^g σ^μ σ^g)`: +1 when the two commute, −1 otherwise.
pub fn s_factor(mu: PauliIndex, g: PauliIndex) -> f64 {
    let p = PauliString::from_indices(&[mu]);
    let q = PauliString::from_indices(&[g]);
    if p.commutes(&q).expect("same length") { 1.0 } else { -1.0 }
}

/// Per-site folded transfer tensor `W[A][μ][ν]`, diagonal in `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldedSiteTensor {
    w: [[[C; 4]; 4]; 4],
}

impl FoldedSiteTensor {
    /// Without the boundary weights: `W̃[0] = δ`, `W̃[1] = Γ_{μν}`,
    /// `W̃[2] = Γ_{νμ}`, `W̃[3] = S_μ δ`.
    pub fn bare(g: PauliIndex) -> Self {
        let mut w = [[[ZERO; 4]; 4]; 4];
        for mu in PauliIndex::ALL {
            for nu in PauliIndex::ALL {
                let (m, n) = (mu.value() as usize, nu.value() as usize);
                w[1][m][n] = gamma_structure(mu, nu, g);
                w[2][m][n] = gamma_structure(nu, mu, g);
            }
            let m = mu.value() as usize;
            w[0][m][m] = ONE;
            w[3][m][m] = C::new(s_factor(mu, g), 0.0);
        }
        FoldedSiteTensor { w }
    }

    pub fn get(&self, a: usize, mu: usize, nu: usize) -> C {
        self.w[a][mu][nu]
    }

    /// `W[a]` as a 4×4 array.
    pub fn block(&self, a: usize) -> &[[C; 4]; 4] {
        &self.w[a]
    }
}

/// `(|φ0|², φ0 φ1*, φ0* φ1, |φ1|²)`
pub fn folded_weights(phi0: C, phi1: C) -> [C; 4] {
    [C::new(phi0.norm_sqr(), 0.0), phi0 * phi1.conj(), phi0.conj() * phi1, C::new(phi1.norm_sqr(), 0.0)]
}

/// `W[A] = w_A · W̃[A]` for a layer with coefficients `(φ0, φ1)`.
pub fn build_folded_site(g: PauliIndex, phi0: C, phi1: C) -> Result<FoldedSiteTensor> {
    let total = phi0.norm_sqr() + phi1.norm_sqr();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(total));
    }
    let mut t = FoldedSiteTensor::bare(g);
    for (a, wa) in folded_weights(phi0, phi1).into_iter().enumerate() {
        t.w[a].iter_mut().flatten().for_each(|x| *x *= wa);
    }
    Ok(t)
}

/// Pauli-basis coefficients `y_j^μ` of a computational product state,
/// `|s⟩⟨s| = (σ⁰ + (−1)^s σ³)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FoldedStateColumn {
    pub y: Vec<[C; 4]>,
}

impl FoldedStateColumn {
    pub fn from_bits(bits: &[u8]) -> Self {
        let y = bits
            .iter()
            .map(|&s| {
                let z = if s & 1 == 0 { 0.5 } else { -0.5 };
                [C::new(0.5, 0.0), ZERO, ZERO, C::new(z, 0.0)]
            })
            .collect();
        FoldedStateColumn { y }
    }

    pub fn num_sites(&self) -> usize {
        self.y.len()
    }
}

/// Value of a contraction plus bookkeeping.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContractionResult {
    pub value: f64,
    /// The network collapsed to the zero state; `value` is then exactly 0.
    pub zero_state: bool,
    /// `1 - ∏(1 - ε)` over all compressions.
    pub truncation: f64,
    pub max_bond: usize,
}

fn dense_pairing(sigma: &PauliString) -> Result<(f64, Vec<Vec<C>>)> {
    let sign = sigma.sign()?;
    let pair = sigma
        .indices()
        .into_iter()
        .map(|nu| {
            let mut v = vec![ZERO; 4];
            v[nu.value() as usize] = C::new(2.0, 0.0);
            v
        })
        .collect();
    Ok((sign, pair))
}

fn layer_mpo(layer: &StabMpoLayer) -> Result<Mpo> {
    let n = layer.num_qubits();
    let weights = folded_weights(layer.phi().0, layer.phi().1);
    let sites = (0..n)
        .map(|j| {
            let t = FoldedSiteTensor::bare(layer.gamma.get(j));
            let left = if j == 0 { 1 } else { 4 };
            let right = if j == n - 1 { 1 } else { 4 };
            let mut w = MpoSite::zeros(left, right, 4, 4);
            for a in 0..4 {
                let (l, r) = (if j == 0 { 0 } else { a }, if j == n - 1 { 0 } else { a });
                let scale = if j == 0 { weights[a] } else { ONE };
                for mu in 0..4 {
                    for nu in 0..4 {
                        let v = t.get(a, mu, nu) * scale;
                        w.set(l, r, mu, nu, w.get(l, r, mu, nu) + v);
                    }
                }
            }
            w
        })
        .collect();
    Mpo::new(sites)
}

/// Row-by-row contraction: evolves the Pauli-basis coefficients of `|s⟩⟨s|`
/// through every layer, then pairs with the transformed observable.
pub fn vertical_fold_evolve(
    y: &FoldedStateColumn,
    circuit: &StabMpoCircuit,
    observable: &PauliString,
    policy: &TruncationPolicy,
) -> Result<(ContractionResult, Mps)> {
    let n = circuit.num_qubits();
    check_len(n, y.num_sites())?;
    let sigma = transform_observable(circuit.residual(), observable)?;
    let mut state = Mps::from_product(&y.y.iter().map(|v| v.to_vec()).collect::<Vec<_>>())?;
    let mut res = ContractionResult { max_bond: 1, ..Default::default() };
    let mut kept = 1.0;
    for layer in circuit.layers() {
        if layer.is_trivial() {
            continue;
        }
        let before = state.norm();
        let t = state.apply_mpo(&layer_mpo(layer)?, policy)?;
        kept *= 1.0 - t.discarded_weight;
        res.max_bond = res.max_bond.max(t.max_bond);
        if state.norm() < COLLAPSE_THRESHOLD * before {
            res.zero_state = true;
            res.truncation = 1.0 - kept;
            return Ok((res, state));
        }
    }
    let (sign, pair) = dense_pairing(&sigma)?;
    let pairing = Mps::from_product(&pair)?;
    res.value = sign * pairing.inner(&state)?.re;
    res.truncation = 1.0 - kept;
    Ok((res, state))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum AuxMode {
    /// `M` sites of dimension 4, one per layer.
    #[default]
    Folded,
    /// `2M` sites of dimension 2: ket rows `1..M`, then bra rows `M..1`.
    Unfolded,
}

impl std::str::FromStr for AuxMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "folded" => Ok(AuxMode::Folded),
            "unfolded" => Ok(AuxMode::Unfolded),
            _ => Err(Error::Config(format!("unknown auxiliary mode `{s}` (folded|unfolded)"))),
        }
    }
}

impl std::fmt::Display for AuxMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            AuxMode::Folded => "folded",
            AuxMode::Unfolded => "unfolded",
        })
    }
}

/// The auxiliary-index MPS built up while sweeping over physical columns.
#[derive(Clone, Debug)]
pub struct AuxChainState {
    mode: AuxMode,
    chain: Mps,
    column: usize,
}

fn pauli_power(g: PauliIndex, a: usize) -> [[C; 2]; 2] {
    if a == 0 { PauliIndex::I.matrix() } else { g.matrix() }
}

fn mat2_mul(a: &[[C; 2]; 2], b: &[[C; 2]; 2]) -> [[C; 2]; 2] {
    let mut out = [[ZERO; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

impl AuxChainState {
    /// Product of the layer boundary vectors. Needs at least one layer.
    pub fn new(circuit: &StabMpoCircuit, mode: AuxMode) -> Result<Self> {
        let layers = circuit.layers();
        if layers.is_empty() {
            return Err(Error::Config("auxiliary chain needs at least one layer".into()));
        }
        let vectors: Vec<Vec<C>> = match mode {
            AuxMode::Folded => layers
                .iter()
                .map(|l| {
                    let (p0, p1) = l.phi();
                    folded_weights(p0, p1).to_vec()
                })
                .collect(),
            AuxMode::Unfolded => {
                let ket = layers.iter().map(|l| vec![l.phi().0, l.phi().1]);
                let bra = layers.iter().rev().map(|l| vec![l.phi().0.conj(), l.phi().1.conj()]);
                ket.chain(bra).collect()
            }
        };
        Ok(AuxChainState { mode, chain: Mps::from_product(&vectors)?, column: 0 })
    }

    pub fn mode(&self) -> AuxMode {
        self.mode
    }

    pub fn chain(&self) -> &Mps {
        &self.chain
    }

    /// Physical columns absorbed so far.
    pub fn column_position(&self) -> usize {
        self.column
    }

    /// Entropy in bits across the middle auxiliary bond `⌈rows/2⌉`.
    pub fn middle_entropy(&self) -> Result<f64> {
        let rows = self.chain.num_sites();
        if rows < 2 {
            return Ok(0.0);
        }
        self.chain.entanglement_entropy(rows.div_ceil(2))
    }

    fn column_mpo(&self, layers: &[StabMpoLayer], j: usize, nu: PauliIndex, bit: u8) -> Result<Mpo> {
        match self.mode {
            AuxMode::Folded => folded_column(layers, j, nu, bit),
            AuxMode::Unfolded => unfolded_column(layers, j, nu, bit),
        }
    }

    /// Absorbs physical column `column_position()` with its observable
    /// component `nu` and initial bit. Returns the truncation report, or
    /// `Err(ZeroState)` when the chain collapses.
    fn absorb(
        &mut self,
        layers: &[StabMpoLayer],
        nu: PauliIndex,
        bit: u8,
        policy: &TruncationPolicy,
    ) -> Result<crate::mps::Truncation> {
        let mpo = self.column_mpo(layers, self.column, nu, bit)?;
        let before = self.chain.norm();
        let t = self.chain.apply_mpo(&mpo, policy)?;
        self.column += 1;
        let after = self.chain.norm();
        if !(after >= COLLAPSE_THRESHOLD * before) {
            return Err(Error::ZeroState(after / before));
        }
        Ok(t)
    }

    /// Sum over all auxiliary configurations.
    fn closure(&self) -> Result<C> {
        let d = self.chain.phys_dim(0);
        let ones = Mps::from_product(&vec![vec![ONE; d]; self.chain.num_sites()])?;
        ones.inner(&self.chain)
    }
}

/// Column `j` as a diagonal MPO over layer sites: bond `μ` threads the
/// Pauli-basis index from the initial coefficients `y_j` (bottom) through
/// `W̃_{m,j}[A_m]` to the pairing `2 e_ν` (top).
fn folded_column(layers: &[StabMpoLayer], j: usize, nu: PauliIndex, bit: u8) -> Result<Mpo> {
    let m_total = layers.len();
    let y = FoldedStateColumn::from_bits(&[bit]).y[0];
    let top = nu.value() as usize;
    let sites = layers
        .iter()
        .enumerate()
        .map(|(m, layer)| {
            let t = FoldedSiteTensor::bare(layer.gamma.get(j));
            let first = m == 0;
            let last = m == m_total - 1;
            let mut w = MpoSite::zeros(if first { 1 } else { 4 }, if last { 1 } else { 4 }, 4, 4);
            for a in 0..4 {
                let blk = t.block(a);
                for mu_out in 0..4 {
                    if last && mu_out != top {
                        continue;
                    }
                    let r = if last { 0 } else { mu_out };
                    let scale = if last { C::new(2.0, 0.0) } else { ONE };
                    for nu_in in 0..4 {
                        let (l, input) = if first { (0, y[nu_in]) } else { (nu_in, ONE) };
                        let v = blk[mu_out][nu_in] * input * scale;
                        if v != ZERO {
                            w.set(l, r, a, a, w.get(l, r, a, a) + v);
                        }
                    }
                }
            }
            w
        })
        .collect();
    Mpo::new(sites)
}

/// Column `j` over `2M` qubit rows: the bond carries the site-`j` ket
/// amplitude from `|s_j⟩` up through `γ^{a_1} … γ^{a_M}`, the observable,
/// then `γ^{b_M} … γ^{b_1}`, closing on `⟨s_j|`.
fn unfolded_column(layers: &[StabMpoLayer], j: usize, nu: PauliIndex, bit: u8) -> Result<Mpo> {
    let m_total = layers.len();
    let rows = 2 * m_total;
    let s = (bit & 1) as usize;
    let obs = nu.matrix();
    let sites = (0..rows)
        .map(|row| {
            let (m, bra) = if row < m_total { (row, false) } else { (rows - 1 - row, true) };
            let g = layers[m].gamma.get(j);
            let (first, last) = (row == 0, row == rows - 1);
            let mut w = MpoSite::zeros(if first { 1 } else { 2 }, if last { 1 } else { 2 }, 2, 2);
            for a in 0..2 {
                let mut op = pauli_power(g, a);
                if bra && m == m_total - 1 {
                    op = mat2_mul(&op, &obs);
                }
                for k_out in 0..2 {
                    if last && k_out != s {
                        continue;
                    }
                    let r = if last { 0 } else { k_out };
                    for k_in in 0..2 {
                        if first && k_in != s {
                            continue;
                        }
                        let l = if first { 0 } else { k_in };
                        let v = op[k_out][k_in];
                        if v != ZERO {
                            w.set(l, r, a, a, w.get(l, r, a, a) + v);
                        }
                    }
                }
            }
            w
        })
        .collect();
    Mpo::new(sites)
}

/// Result of a column-by-column contraction.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HorizontalResult {
    pub contraction: ContractionResult,
    /// Middle-bond entropy (bits) after each physical column `n = 1..N`.
    pub entropy: Vec<f64>,
}

/// Contracts the network column by column for a computational product
/// initial state `bits`.
pub fn horizontal_contract(
    circuit: &StabMpoCircuit,
    observable: &PauliString,
    bits: &[u8],
    policy: &TruncationPolicy,
    mode: AuxMode,
) -> Result<HorizontalResult> {
    let n = circuit.num_qubits();
    check_len(n, bits.len())?;
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::Config("initial state must be a computational product state".into()));
    }
    let sigma = transform_observable(circuit.residual(), observable)?;
    let sign = sigma.sign()?;
    let mut out = HorizontalResult::default();
    if circuit.layers().is_empty() {
        let v: f64 = (0..n)
            .map(|j| match sigma.get(j) {
                PauliIndex::I => 1.0,
                PauliIndex::Z => if bits[j] == 0 { 1.0 } else { -1.0 },
                _ => 0.0,
            })
            .product();
        out.contraction = ContractionResult { value: sign * v, zero_state: false, truncation: 0.0, max_bond: 1 };
        out.entropy = vec![0.0; n];
        return Ok(out);
    }
    let policy = TruncationPolicy { renormalize: true, ..*policy };
    let mut aux = AuxChainState::new(circuit, mode)?;
    let mut kept = 1.0;
    let mut max_bond = 1;
    for j in 0..n {
        match aux.absorb(circuit.layers(), sigma.get(j), bits[j], &policy) {
            Ok(t) => {
                kept *= 1.0 - t.discarded_weight;
                max_bond = max_bond.max(t.max_bond);
                out.entropy.push(aux.middle_entropy()?);
            }
            Err(Error::ZeroState(_)) => {
                out.entropy.resize(n, 0.0);
                out.contraction = ContractionResult { value: 0.0, zero_state: true, truncation: 1.0 - kept, max_bond };
                return Ok(out);
            }
            Err(e) => return Err(e),
        }
    }
    let value = sign * aux.closure()?.re;
    out.contraction = ContractionResult { value, zero_state: false, truncation: 1.0 - kept, max_bond };
    Ok(out)
}

/// Writes `S_{n,m}` rows as `n,m,entropy_bits`; `grid[m-1][n-1]` holds the
/// entropy after column `n` for the first `m` layers.
pub fn write_entropy_csv(grid: &[Vec<f64>], out: &mut impl Write) -> Result<()> {
    writeln!(out, "n,m,entropy_bits")?;
    for (m, row) in grid.iter().enumerate() {
        for (n, s) in row.iter().enumerate() {
            writeln!(out, "{},{},{:.12}", n + 1, m + 1, s)?;
        }
    }
    Ok(())
}
