//! Fast built-in consistency checks, run by the `selftest` subcommand.

use rand::Rng;

use crate::clifford::{sample_brickwall_from, CliffordCircuit, Direction, Gate};
use crate::dense::DenseState;
use crate::error::Result;
use crate::mps::{Mps, TruncationPolicy};
use crate::pauli::{PauliIndex, PauliString};
use crate::stab_mpo::{expectation, RotationGate};
use crate::temporal::{
    build_folded_site, gamma_structure, horizontal_contract, s_factor, vertical_fold_evolve, AuxMode,
    FoldedStateColumn,
};

use super::config::FloquetConfig;
use super::program::{dense_oracle_run, Program};
use super::runs::{analytic_magnetization, floquet_realization, realization_rng, Track};
use super::twirl::twirl_s_channel_check;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((passed, detail)) => CheckResult { name, passed, detail },
        Err(e) => CheckResult { name, passed: false, detail: format!("error: {e}") },
    }
}

fn random_pauli(n: usize, rng: &mut impl Rng) -> PauliString {
    let idx: Vec<PauliIndex> = (0..n).map(|_| PauliIndex::new(rng.gen_range(0..4)).expect("< 4")).collect();
    PauliString::from_indices(&idx)
}

fn tableau_vs_dense() -> Result<(bool, String)> {
    let mut rng = realization_rng(11, 0);
    let n = 4;
    let mut worst = 0.0f64;
    for _ in 0..40 {
        let mut c = CliffordCircuit::new(n);
        for _ in 0..20 {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            c.push([Gate::H(a), Gate::S(a), Gate::Cnot(a, b), Gate::Cz(a, b)][rng.gen_range(0..4)])?;
        }
        let u = c.to_dense()?;
        let p = random_pauli(n, &mut rng);
        let img = c.tableau().conjugate(&p, Direction::Forward)?;
        worst = worst.max((&u * p.to_dense()? * u.adjoint() - img.to_dense()?).norm());
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.1e}")))
}

fn w_tensor_algebra() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for mu in PauliIndex::ALL {
        for nu in PauliIndex::ALL {
            for g in PauliIndex::ALL {
                let z = gamma_structure(mu, nu, g) - gamma_structure(nu, mu, g).conj();
                worst = worst.max(z.norm());
            }
            worst = worst.max((s_factor(mu, nu).abs() - 1.0).abs());
        }
    }
    let phi = num_complex::Complex64::new(0.0, 0.0);
    let site = build_folded_site(PauliIndex::Y, num_complex::Complex64::new(1.0, 0.0), phi)?;
    let only_first = (1..4).all(|a| site.block(a).iter().flatten().all(|x| x.norm() == 0.0));
    Ok((worst < 1e-14 && only_first, format!("max deviation {worst:.1e}")))
}

fn cross_method() -> Result<(bool, String)> {
    let mut rng = realization_rng(23, 0);
    let exact = TruncationPolicy::exact();
    let mut worst = 0.0f64;
    for _ in 0..6 {
        let n = rng.gen_range(2..=5);
        let mut prog = Program::new(n);
        for k in 0..3 {
            let axis = PauliIndex::new(rng.gen_range(1..4)).expect("< 4");
            let r = RotationGate::new(rng.gen_range(0..n), axis, rng.gen_range(-3.0..3.0))?;
            prog.push_block(sample_brickwall_from(n, 2, 2 * k + 1, &mut rng)?, vec![r])?;
        }
        let bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let obs = random_pauli(n, &mut rng);
        let circ = prog.compile()?;
        let dense: DenseState = dense_oracle_run(&prog, &bits)?.pop().expect("non-empty");
        let want = dense.expect_pauli(&obs)?.re;
        let (a, _) = expectation(&Mps::product_state(&bits), &circ, &obs, &exact)?;
        let (b, _) = vertical_fold_evolve(&FoldedStateColumn::from_bits(&bits), &circ, &obs, &exact)?;
        let c = horizontal_contract(&circ, &obs, &bits, &exact, AuxMode::Folded)?;
        for v in [a, b.value, c.contraction.value] {
            worst = worst.max((v - want).abs());
        }
    }
    Ok((worst < 1e-8, format!("max deviation {worst:.1e}")))
}

fn floquet_perfect_kicks() -> Result<(bool, String)> {
    let cfg = FloquetConfig { n: 10, epsilon: 0.0, periods: 8, realizations: 1, ..Default::default() };
    let r = floquet_realization(&cfg, 0)?;
    let recs = r.track(Track::StabMpo).expect("stab track");
    let worst = recs
        .iter()
        .map(|s| (s.observable - analytic_magnetization(0.0, s.m)).abs().max(s.entropy.abs()))
        .fold(0.0, f64::max);
    Ok((worst < 1e-12, format!("max deviation {worst:.1e}")))
}

fn truncation_accounting() -> Result<(bool, String)> {
    let mut rng = realization_rng(5, 0);
    let n = 8;
    let d = DenseState::random(n, &mut rng)?;
    let exact = Mps::from_dense(n, d.amplitudes())?;
    let mut m = exact.clone();
    let t = m.compress(&TruncationPolicy { chi_max: 4, svd_cutoff: 0.0, renormalize: false });
    let f = exact.inner(&m)?.norm_sqr() / m.inner(&m)?.re;
    let dev = (1.0 - f - t.discarded_weight).abs();
    Ok((dev < 1e-8, format!("|1-F-eps| = {dev:.1e}")))
}

/// Runs every check; the CLI exits non-zero if any fails.
pub fn selftest() -> Vec<CheckResult> {
    vec![
        check("tableau_vs_dense", tableau_vs_dense),
        check("w_tensor_algebra", w_tensor_algebra),
        check("twirl", || Ok((twirl_s_channel_check(), String::new()))),
        check("cross_method", cross_method),
        check("floquet_perfect_kicks", floquet_perfect_kicks),
        check("truncation_accounting", truncation_accounting),
    ]
}
