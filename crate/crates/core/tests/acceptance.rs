//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use stabmpo::clifford::{sample_brickwall_from, CliffordCircuit, Direction, Gate, U1Clifford};
use stabmpo::dense::DenseState;
use stabmpo::harness::{
    analytic_magnetization, dense_oracle_run, realization_rng, run_floquet, run_tdoped, twirl_report, FloquetConfig,
    Program, RunResult, TDopedConfig, Track,
};
use stabmpo::mps::{Mps, TruncationPolicy};
use stabmpo::pauli::{PauliIndex, PauliString};
use stabmpo::stab_mpo::{apply_layer, expectation, RotationGate};
use stabmpo::temporal::{
    build_folded_site, gamma_structure, horizontal_contract, s_factor, vertical_fold_evolve, AuxMode,
    FoldedStateColumn,
};

type C = Complex64;
type M = DMatrix<C>;
type Outcome = Result<(bool, String), String>;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// Pauli matrices written out independently of the library.
fn sigma(mu: usize) -> M {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let e = match mu {
        0 => [l, o, o, l],
        1 => [o, l, l, o],
        2 => [o, -i, i, o],
        _ => [l, o, o, -l],
    };
    M::from_row_slice(2, 2, &e)
}

fn pauli_from_str(s: &str) -> PauliString {
    s.parse().expect("valid literal")
}

fn random_pauli(n: usize, rng: &mut impl Rng, hermitian_sign: bool) -> PauliString {
    let idx: Vec<PauliIndex> = (0..n).map(|_| PauliIndex::new(rng.gen_range(0..4)).unwrap()).collect();
    let p = PauliString::from_indices(&idx);
    if hermitian_sign && rng.gen_bool(0.5) {
        p.with_phase(2)
    } else {
        p
    }
}

fn random_bits(n: usize, rng: &mut impl Rng) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..2)).collect()
}

fn random_clifford(n: usize, gates: usize, rng: &mut impl Rng) -> CliffordCircuit {
    let mut circ = CliffordCircuit::new(n);
    for _ in 0..gates {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let g = [Gate::H(a), Gate::S(a), Gate::Cnot(a, b), Gate::Cz(a, b)][rng.gen_range(0..4)];
        circ.push(g).unwrap();
    }
    circ
}

fn floquet_law() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut detail = String::new();
    for eps in [0.05, 0.1] {
        let cfg = FloquetConfig { n: 12, epsilon: eps, periods: 15, chi: 128, realizations: 50, seed: 1, ..Default::default() };
        let run = run_floquet(&cfg).map_err(err)?;
        for row in run.aggregate.iter().filter(|r| r.track == Track::StabMpo) {
            let (mean, stderr) = row.observable;
            let want = analytic_magnetization(eps, row.m);
            let excess = (mean - want).abs() - (3.0 * stderr).max(0.02);
            if excess > worst {
                worst = excess;
                detail = format!("worst at eps={eps} m={}: |{mean:.4} - {want:.4}| vs tol {:.4}", row.m, (3.0 * stderr).max(0.02));
            }
        }
        if run.aggregate.iter().filter(|r| r.track == Track::StabMpo).count() != 16 {
            return Ok((false, "expected periods 0..=15".into()));
        }
    }
    Ok((worst <= 0.0, detail))
}

fn perfect_kicks() -> Outcome {
    let mut worst = 0.0f64;
    for n in [1, 2, 5, 12, 20] {
        let cfg = FloquetConfig { n, epsilon: 0.0, periods: 12, realizations: 1, seed: 3, ..Default::default() };
        let run = run_floquet(&cfg).map_err(err)?;
        for s in run.realizations[0].track(Track::StabMpo).ok_or("missing track")? {
            let want = if s.m % 2 == 0 { 1.0 } else { -1.0 };
            worst = worst.max((s.observable - want).abs()).max(s.entropy.abs());
        }
    }
    Ok((worst < 1e-12, format!("max deviation {worst:.1e} over n in {{1,2,5,12,20}}")))
}

fn cross_method() -> Outcome {
    let mut rng = realization_rng(303, 0);
    let exact = TruncationPolicy::exact();
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.gen_range(2..=6);
        let blocks = rng.gen_range(1..=4);
        let mut prog = Program::new(n);
        for k in 0..blocks {
            let site = rng.gen_range(0..n);
            let r = if rng.gen_bool(0.5) {
                RotationGate::t(site)
            } else {
                let axis = PauliIndex::new(rng.gen_range(1..4)).unwrap();
                RotationGate::new(site, axis, rng.gen_range(-3.1..3.1)).map_err(err)?
            };
            let d = rng.gen_range(1..=2);
            prog.push_block(sample_brickwall_from(n, d, 2 * k + 1, &mut rng).map_err(err)?, vec![r]).map_err(err)?;
        }
        let bits = random_bits(n, &mut rng);
        let obs = random_pauli(n, &mut rng, true);
        let circ = prog.compile().map_err(err)?;
        let dense = dense_oracle_run(&prog, &bits).map_err(err)?.pop().ok_or("no state")?;
        let mut vals = vec![dense.expect_pauli(&obs).map_err(err)?.re];
        vals.push(expectation(&Mps::product_state(&bits), &circ, &obs, &exact).map_err(err)?.0);
        vals.push(vertical_fold_evolve(&FoldedStateColumn::from_bits(&bits), &circ, &obs, &exact).map_err(err)?.0.value);
        for mode in [AuxMode::Folded, AuxMode::Unfolded] {
            vals.push(horizontal_contract(&circ, &obs, &bits, &exact, mode).map_err(err)?.contraction.value);
        }
        for a in &vals {
            for b in &vals {
                worst = worst.max((a - b).abs());
            }
        }
    }
    Ok((worst < 1e-8, format!("max pairwise deviation {worst:.1e}")))
}

fn tableau_correctness() -> Outcome {
    // Forward images U P U† of the generators, standard textbook table.
    let table: [(Gate, usize, [&str; 4]); 6] = [
        (Gate::H(0), 1, ["Z", "X", "", ""]),
        (Gate::S(0), 1, ["Y", "Z", "", ""]),
        (Gate::Cnot(0, 1), 2, ["XX", "ZI", "IX", "ZZ"]),
        (Gate::Cnot(1, 0), 2, ["XI", "ZZ", "XX", "IZ"]),
        (Gate::Cz(0, 1), 2, ["XZ", "ZI", "ZX", "IZ"]),
        (Gate::Cz(1, 0), 2, ["XZ", "ZI", "ZX", "IZ"]),
    ];
    let mut table_ok = true;
    for (g, n, images) in table {
        let t = CliffordCircuit::from_gates(n, vec![g]).map_err(err)?.tableau();
        for j in 0..n {
            table_ok &= t.x_image(j) == &pauli_from_str(images[2 * j]);
            table_ok &= t.z_image(j) == &pauli_from_str(images[2 * j + 1]);
        }
    }
    // Y images carry the signs: H Y H = −Y, S Y S† = −X.
    let yh = CliffordCircuit::from_gates(1, vec![Gate::H(0)]).map_err(err)?.tableau();
    let ys = CliffordCircuit::from_gates(1, vec![Gate::S(0)]).map_err(err)?.tableau();
    table_ok &= yh.conjugate(&pauli_from_str("Y"), Direction::Forward).map_err(err)? == pauli_from_str("-Y");
    table_ok &= ys.conjugate(&pauli_from_str("Y"), Direction::Forward).map_err(err)? == pauli_from_str("-X");

    let mut rng = realization_rng(404, 0);
    let n = 4;
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let circ = random_clifford(n, rng.gen_range(1..40), &mut rng);
        let u = circ.to_dense().map_err(err)?;
        let t = circ.tableau();
        let mut inputs: Vec<PauliString> = (0..n)
            .flat_map(|j| [PauliIndex::X, PauliIndex::Z].map(|mu| PauliString::single(n, j, mu).unwrap()))
            .collect();
        inputs.push(random_pauli(n, &mut rng, true));
        for p in inputs {
            let pd = p.to_dense().map_err(err)?;
            let fwd = t.conjugate(&p, Direction::Forward).map_err(err)?.to_dense().map_err(err)?;
            let inv = t.conjugate(&p, Direction::Inverse).map_err(err)?.to_dense().map_err(err)?;
            worst = worst.max((&u * &pd * u.adjoint() - fwd).norm());
            worst = worst.max((u.adjoint() * &pd * &u - inv).norm());
        }
    }
    Ok((table_ok && worst < 1e-12, format!("table {}, random circuits max deviation {worst:.1e}", if table_ok { "exact" } else { "MISMATCH" })))
}

fn twirl_suite() -> Outcome {
    let mut worst = 0.0f64;
    for eps in [0.0, 0.05, 0.1, 0.3, 0.7, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2] {
        worst = worst.max(twirl_report(eps).max_error());
    }
    // C† Z_j C computed densely must be +Z_k for a single k; the map j → k is a permutation.
    let mut rng = realization_rng(505, 0);
    let mut u1_ok = true;
    for _ in 0..300 {
        let n = rng.gen_range(1..=5);
        let u = U1Clifford::sample(n, &mut rng).map_err(err)?;
        let circ = u.circuit();
        let ud = circ.to_dense().map_err(err)?;
        let t = circ.tableau();
        let mut hit = vec![false; n];
        for j in 0..n {
            let z = PauliString::single(n, j, PauliIndex::Z).unwrap();
            let img = t.conjugate(&z, Direction::Inverse).map_err(err)?;
            let dense = ud.adjoint() * z.to_dense().map_err(err)? * &ud;
            let k = (0..n).find(|&k| img == PauliString::single(n, k, PauliIndex::Z).unwrap());
            match k {
                Some(k) if !hit[k] => {
                    hit[k] = true;
                    u1_ok &= (dense - img.to_dense().map_err(err)?).norm() < 1e-12;
                }
                _ => u1_ok = false,
            }
        }
    }
    for _ in 0..50 {
        let n = rng.gen_range(6..=40);
        let t = U1Clifford::sample(n, &mut rng).map_err(err)?.circuit().tableau();
        for j in 0..n {
            let img = t.conjugate(&PauliString::single(n, j, PauliIndex::Z).unwrap(), Direction::Inverse).map_err(err)?;
            u1_ok &= img.weight() == 1 && img.is_diagonal() && img.phase_exp() == 0;
        }
    }
    Ok((worst < 1e-12 && u1_ok, format!("twirl max error {worst:.1e}, U(1) Z-map checks {}", if u1_ok { "ok" } else { "FAILED" })))
}

fn w_tensor_algebra() -> Outcome {
    let half = c(0.5, 0.0);
    let mut exact = true;
    for mu in 0..4 {
        for nu in 0..4 {
            for g in 0..4 {
                let want = (sigma(mu) * sigma(nu) * sigma(g)).trace() * half;
                let (m, v, gi) = (PauliIndex::new(mu as u8).unwrap(), PauliIndex::new(nu as u8).unwrap(), PauliIndex::new(g as u8).unwrap());
                exact &= gamma_structure(m, v, gi) == want;
            }
        }
        for g in 0..4 {
            let want = (sigma(mu) * sigma(g) * sigma(mu) * sigma(g)).trace() * half;
            let got = s_factor(PauliIndex::new(mu as u8).unwrap(), PauliIndex::new(g as u8).unwrap());
            exact &= c(got, 0.0) == want;
        }
    }
    // 𝕋 = φ0 σ⁰ + φ1 σ^γ; auxiliary pair (a, b) picks the ket and bra terms.
    let mut rng = realization_rng(606, 0);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = rng.gen_range(0..4);
        let theta: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let phi = [c((theta / 2.0).cos(), 0.0), c(0.0, -(theta / 2.0).sin())];
        let ops = [sigma(0) * phi[0], sigma(g) * phi[1]];
        let site = build_folded_site(PauliIndex::new(g as u8).unwrap(), phi[0], phi[1]).map_err(err)?;
        let full = &ops[0] + &ops[1];
        for mu in 0..4 {
            for nu in 0..4 {
                let mut sum = c(0.0, 0.0);
                for (aux, (a, b)) in [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter().enumerate() {
                    let want = (sigma(mu) * &ops[a] * sigma(nu) * ops[b].adjoint()).trace() * half;
                    worst = worst.max((site.get(aux, mu, nu) - want).norm());
                    sum += site.get(aux, mu, nu);
                }
                let whole = (sigma(mu) * &full * sigma(nu) * full.adjoint()).trace() * half;
                worst = worst.max((sum - whole).norm());
            }
        }
    }
    Ok((exact && worst < 1e-12, format!("80 structure constants {}, folded sites max deviation {worst:.1e}", if exact { "exact" } else { "MISMATCH" })))
}

fn entanglement_reduction() -> Outcome {
    let cfg = TDopedConfig { n: 16, m_layers: 10, depth_d: 1, chi: 64, realizations: 20, seed: 1, run_baseline: true, ..Default::default() };
    let start = Instant::now();
    let run = run_tdoped(&cfg).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let mean = |t: Track| -> Vec<f64> { run.aggregate.iter().filter(|r| r.track == t).map(|r| r.entropy.0).collect() };
    let (stab, base) = (mean(Track::StabMpo), mean(Track::Baseline));
    if stab.len() != 11 || base.len() != 11 {
        return Ok((false, "missing blocks".into()));
    }
    let every = stab.iter().zip(&base).all(|(s, b)| *s <= *b + 1e-12);
    let last = stab[10] < base[10];
    Ok((every && last, format!("final block {:.3} vs {:.3} bits, {secs:.1}s", stab[10], base[10])))
}

fn unitarity_and_truncation() -> Outcome {
    let mut rng = realization_rng(808, 0);
    let exact = TruncationPolicy::exact();
    let mut norm_dev = 0.0f64;
    for _ in 0..30 {
        let n = rng.gen_range(2..=8);
        let mut prog = Program::new(n);
        for k in 0..6 {
            let axis = PauliIndex::new(rng.gen_range(1..4)).unwrap();
            let r = RotationGate::new(rng.gen_range(0..n), axis, rng.gen_range(-3.0..3.0)).map_err(err)?;
            prog.push_block(sample_brickwall_from(n, 2, 2 * k + 1, &mut rng).map_err(err)?, vec![r]).map_err(err)?;
        }
        let circ = prog.compile().map_err(err)?;
        let mut psi = Mps::from_dense(n, DenseState::random(n, &mut rng).map_err(err)?.amplitudes()).map_err(err)?;
        for layer in circ.layers() {
            let before = psi.norm();
            apply_layer(&mut psi, layer, &exact).map_err(err)?;
            norm_dev = norm_dev.max((psi.norm() / before - 1.0).abs());
        }
    }
    let mut fid_dev = 0.0f64;
    for _ in 0..40 {
        let n = rng.gen_range(4..=8);
        let target = DenseState::random(n, &mut rng).map_err(err)?;
        let full = Mps::from_dense(n, target.amplitudes()).map_err(err)?;
        let mut cut = full.clone();
        let chi = rng.gen_range(1..=4);
        let t = cut.compress(&TruncationPolicy { chi_max: chi, svd_cutoff: 0.0, renormalize: false });
        let approx = DenseState::from_amplitudes(n, cut.to_dense().map_err(err)?).map_err(err)?;
        let overlap = target.inner(&approx).map_err(err)?.norm_sqr();
        let fidelity = overlap / (target.norm().powi(2) * approx.norm().powi(2));
        fid_dev = fid_dev.max((1.0 - fidelity - t.discarded_weight).abs());
    }
    Ok((norm_dev < 1e-10 && fid_dev < 1e-8, format!("layer norm drift {norm_dev:.1e}, |1-F-eps| {fid_dev:.1e}")))
}

fn bodies(r: &RunResult) -> (String, String, Option<String>) {
    (r.trajectory_csv(), r.aggregate_csv(), r.temporal_csv())
}

fn determinism() -> Outcome {
    let td = TDopedConfig { n: 8, m_layers: 4, chi: 16, realizations: 6, seed: 42, run_baseline: true, run_temporal: true, ..Default::default() };
    let fl = FloquetConfig { n: 8, epsilon: 0.1, periods: 6, chi: 32, realizations: 6, seed: 42, ..Default::default() };
    let a = (bodies(&run_tdoped(&td).map_err(err)?), bodies(&run_floquet(&fl).map_err(err)?));
    let b = (bodies(&run_tdoped(&td).map_err(err)?), bodies(&run_floquet(&fl).map_err(err)?));
    let dir = tempfile::tempdir().map_err(err)?;
    let mut files = Vec::new();
    for k in 0..2 {
        let d = dir.path().join(k.to_string());
        run_tdoped(&td).map_err(err)?.write(&d).map_err(err)?;
        let read = |f: &str| std::fs::read(d.join(f)).map_err(err);
        files.push((read("trajectory.csv")?, read("aggregate.csv")?, read("temporal.csv")?));
    }
    let same = a == b && files[0] == files[1];
    Ok((same, format!("CSV bodies {}", if same { "byte-identical" } else { "DIFFER" })))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 floquet magnetization law", floquet_law),
        ("2 perfect kicks exact", perfect_kicks),
        ("3 cross-method equivalence", cross_method),
        ("4 tableau correctness", tableau_correctness),
        ("5 twirl suite", twirl_suite),
        ("6 W-tensor algebra", w_tensor_algebra),
        ("7 entanglement reduction", entanglement_reduction),
        ("8 unitarity and truncation accounting", unitarity_and_truncation),
        ("9 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        failed += usize::from(!ok);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
