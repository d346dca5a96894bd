//! Two-replica checks behind the closed-form Floquet magnetization.
//!
//! Single-site replica basis `|k b⟩` (ket, bra) with `k, b ∈ {0, 1}`.

use num_complex::Complex64;
use rand::Rng;

use crate::clifford::{CliffordTableau, Direction, Gate, U1Clifford};
use crate::dense::{kron, CMatrix, CVector};
use crate::pauli::{PauliIndex, PauliString};
use crate::stab_mpo::RotationGate;

type C = Complex64;

fn conj(m: &CMatrix) -> CMatrix {
    m.map(|x| x.conj())
}

/// `¼ Σ_μ S^μ ⊗ (S^μ)*`
pub fn s_twirl() -> CMatrix {
    let s = Gate::S(0).matrix();
    let mut acc = CMatrix::zeros(4, 4);
    let mut p = CMatrix::identity(2, 2);
    for _ in 0..4 {
        acc += kron(&p, &conj(&p));
        p = &s * p;
    }
    acc * C::new(0.25, 0.0)
}

fn diag(v: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(v.len(), v.iter().map(|&x| C::new(x, 0.0))))
}

/// Deviations found by [`twirl_report`]; all should vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct TwirlReport {
    pub epsilon: f64,
    /// `‖𝒮 − diag(1,0,0,1)‖`
    pub s_twirl: f64,
    /// `‖(𝒮⊗𝒮)(CZ ⊗ CZ*)(𝒮⊗𝒮) − 𝒮⊗𝒮‖`, replicas ordered `(k1, b1, k2, b2)`.
    pub cz_invariance: f64,
    /// `𝒮K𝒮 (|00⟩ + |11⟩) = |00⟩ + |11⟩` with `K = R ⊗ R*`, `R = R^x(π+2ε)`.
    pub plus_eigen: f64,
    /// `𝒮K𝒮 (|00⟩ − |11⟩) = −cos 2ε (|00⟩ − |11⟩)`
    pub minus_eigen: f64,
    /// `K𝒮` has rank ≤ 2, so matching `Tr(K𝒮)` and `Tr((K𝒮)²)` with
    /// `1 − cos 2ε` and `1 + cos² 2ε` fixes its spectrum to `{1, −cos 2ε, 0, 0}`.
    pub spectrum: f64,
}

impl TwirlReport {
    pub fn max_error(&self) -> f64 {
        [self.s_twirl, self.cz_invariance, self.plus_eigen, self.minus_eigen, self.spectrum]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

pub fn twirl_report(epsilon: f64) -> TwirlReport {
    let p = s_twirl();
    let s_twirl = (&p - diag(&[1.0, 0.0, 0.0, 1.0])).norm();

    // CZ acts on the two ket replicas, CZ* on the two bra replicas
    let mut cz2 = CMatrix::zeros(16, 16);
    for i in 0..16 {
        let (k1, b1, k2, b2) = ((i >> 3) & 1, (i >> 2) & 1, (i >> 1) & 1, i & 1);
        cz2[(i, i)] = C::new(if (k1 & k2) ^ (b1 & b2) == 1 { -1.0 } else { 1.0 }, 0.0);
    }
    let pp = kron(&p, &p);
    let cz_invariance = (&pp * cz2 * &pp - &pp).norm();

    let r = RotationGate::new(0, PauliIndex::X, std::f64::consts::PI + 2.0 * epsilon).expect("valid axis").matrix();
    let k = kron(&r, &conj(&r));
    let pkp = &p * &k * &p;
    let plus = CVector::from_vec(vec![C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)]);
    let minus = CVector::from_vec(vec![C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(-1.0, 0.0)]);
    let lam = -(2.0 * epsilon).cos();
    let plus_eigen = (&pkp * &plus - &plus).norm();
    let minus_eigen = (&pkp * &minus - &minus * C::new(lam, 0.0)).norm();
    let kp = &k * &p;
    let t1 = (kp.trace() - C::new(1.0 + lam, 0.0)).norm();
    let t2 = ((&kp * &kp).trace() - C::new(1.0 + lam * lam, 0.0)).norm();
    TwirlReport { epsilon, s_twirl, cz_invariance, plus_eigen, minus_eigen, spectrum: t1.max(t2) }
}

/// `C† Z_j C = +Z_{π⁻¹(j)}` for a sampled U(1) Clifford, i.e. every `Z_j`
/// maps to a single unsigned `Z` and the map is the inverse permutation.
pub fn u1_preserves_z(u: &U1Clifford) -> bool {
    let n = u.num_qubits();
    let t: CliffordTableau = u.circuit().tableau();
    let mut inverse = vec![0; n];
    for (j, &target) in u.permutation.iter().enumerate() {
        inverse[target] = j;
    }
    (0..n).all(|j| {
        let z = PauliString::single(n, j, PauliIndex::Z).expect("in range");
        let want = PauliString::single(n, inverse[j], PauliIndex::Z).expect("in range");
        t.conjugate(&z, Direction::Inverse).map(|img| img == want).unwrap_or(false)
    })
}

/// The S-twirl, CZ invariance and kick spectrum at several kick strengths,
/// plus a batch of sampled U(1) Cliffords.
pub fn twirl_s_channel_check() -> bool {
    const TOL: f64 = 1e-12;
    let eps_ok = [0.0, 0.05, 0.1, 0.3, std::f64::consts::FRAC_PI_4]
        .into_iter()
        .all(|e| twirl_report(e).max_error() < TOL);
    let mut rng = super::realization_rng(0x7a11, 0);
    let u1_ok = (0..200).all(|_| {
        let n = rng.gen_range(1..10);
        U1Clifford::sample(n, &mut rng).map(|u| u1_preserves_z(&u)).unwrap_or(false)
    });
    eps_ok && u1_ok
}
