use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::clifford::{sample_brickwall_from, sample_u1_clifford};
use crate::error::{Error, Result};
use crate::mps::{Mps, TruncationPolicy};
use crate::pauli::{PauliIndex, PauliString};
use crate::stab_mpo::{apply_layer, transform_observable, RotationGate, StabMpoCircuit};
use crate::temporal::{horizontal_contract, write_entropy_csv, AuxMode};

use super::config::{ExperimentConfig, FloquetConfig, TDopedConfig};
use super::program::{apply_clifford_mps, Program};

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "STABMPO_WORKERS";

/// Per-realization stream: the same `(seed, id)` always yields the same
/// circuit, whatever the total number of realizations.
pub fn realization_rng(seed: u64, id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}

/// `(−1)^m cos(2ε)^m`
pub fn analytic_magnetization(epsilon: f64, m: usize) -> f64 {
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    sign * (2.0 * epsilon).cos().powi(m as i32)
}

/// Sample mean and standard error (`s/√k`, zero for a single sample).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let k = xs.len();
    if k == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k as f64;
    if k == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    (mean, (var / k as f64).sqrt())
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Track {
    StabMpo,
    Baseline,
}

impl Track {
    pub fn name(self) -> &'static str {
        match self {
            Track::StabMpo => "stab_mpo",
            Track::Baseline => "baseline",
        }
    }
}

/// State of one track after block `m` (`m = 0` is the initial state).
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub m: usize,
    pub entropy: f64,
    pub observable: f64,
    pub max_bond: usize,
    pub cum_truncation: f64,
    pub zero_state: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RealizationResult {
    pub id: usize,
    pub tracks: Vec<(Track, Vec<StepRecord>)>,
    /// `grid[m-1][n-1]`: temporal entropy after column `n` for `m` layers.
    pub temporal: Option<Vec<Vec<f64>>>,
}

impl RealizationResult {
    pub fn track(&self, t: Track) -> Option<&[StepRecord]> {
        self.tracks.iter().find(|(k, _)| *k == t).map(|(_, r)| r.as_slice())
    }
}

fn mean_expectation(psi: &Mps, observables: &[PauliString]) -> Result<f64> {
    let mut acc = 0.0;
    for o in observables {
        acc += psi.expect_pauli(o)?;
    }
    Ok(acc / observables.len() as f64)
}

fn collapsed(m: usize, kept: f64, max_bond: usize) -> StepRecord {
    StepRecord { m, entropy: 0.0, observable: 0.0, max_bond, cum_truncation: 1.0 - kept, zero_state: true }
}

/// Evolves `|bits⟩` by the compiled layers block by block, measuring the mean
/// of `observables` pushed through the residual Clifford at each step.
pub fn run_stab_track(
    program: &Program,
    bits: &[u8],
    observables: &[PauliString],
    policy: &TruncationPolicy,
) -> Result<Vec<StepRecord>> {
    let n = program.num_qubits();
    let mut circuit = StabMpoCircuit::new(n);
    let mut psi = Mps::product_state(bits);
    let mut kept = 1.0;
    let mut max_bond = 1;
    let measure = |psi: &Mps, circuit: &StabMpoCircuit| -> Result<f64> {
        let sigmas =
            observables.iter().map(|o| transform_observable(circuit.residual(), o)).collect::<Result<Vec<_>>>()?;
        mean_expectation(psi, &sigmas)
    };
    let mut out = vec![StepRecord {
        m: 0,
        entropy: psi.half_chain_entropy()?,
        observable: measure(&psi, &circuit)?,
        max_bond,
        cum_truncation: 0.0,
        zero_state: false,
    }];
    let mut dead = false;
    for (k, block) in program.blocks().iter().enumerate() {
        let m = k + 1;
        if dead {
            out.push(collapsed(m, kept, max_bond));
            continue;
        }
        circuit.append_clifford(&block.clifford)?;
        for r in &block.rotations {
            let layer = circuit.push_rotation(r)?.clone();
            match apply_layer(&mut psi, &layer, policy) {
                Ok(t) => {
                    kept *= 1.0 - t.discarded_weight;
                    max_bond = max_bond.max(t.max_bond);
                }
                Err(Error::ZeroState(_)) => {
                    dead = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if dead {
            out.push(collapsed(m, kept, max_bond));
            continue;
        }
        out.push(StepRecord {
            m,
            entropy: psi.half_chain_entropy()?,
            observable: measure(&psi, &circuit)?,
            max_bond,
            cum_truncation: 1.0 - kept,
            zero_state: false,
        });
    }
    Ok(out)
}

/// Applies every gate of the program to an MPS in circuit order.
pub fn run_baseline_track(
    program: &Program,
    bits: &[u8],
    observables: &[PauliString],
    policy: &TruncationPolicy,
) -> Result<Vec<StepRecord>> {
    let mut psi = Mps::product_state(bits);
    let mut kept = 1.0;
    let mut max_bond = 1;
    let mut out = vec![StepRecord {
        m: 0,
        entropy: psi.half_chain_entropy()?,
        observable: mean_expectation(&psi, observables)?,
        max_bond,
        cum_truncation: 0.0,
        zero_state: false,
    }];
    for (k, block) in program.blocks().iter().enumerate() {
        let t = apply_clifford_mps(&mut psi, &block.clifford, policy)?;
        kept *= 1.0 - t.discarded_weight;
        max_bond = max_bond.max(t.max_bond);
        for r in &block.rotations {
            psi.apply_1q_gate(&r.matrix(), r.site)?;
        }
        out.push(StepRecord {
            m: k + 1,
            entropy: psi.half_chain_entropy()?,
            observable: mean_expectation(&psi, observables)?,
            max_bond,
            cum_truncation: 1.0 - kept,
            zero_state: false,
        });
    }
    Ok(out)
}

/// Blocks of `depth_d` brick-wall sublayers followed by a T on a uniformly
/// random qubit. The sublayer parity runs on across blocks.
pub fn sample_tdoped_program(cfg: &TDopedConfig, id: usize) -> Result<Program> {
    let mut rng = realization_rng(cfg.seed, id);
    let mut p = Program::new(cfg.n);
    for m in 0..cfg.m_layers {
        let c = sample_brickwall_from(cfg.n, cfg.depth_d, m * cfg.depth_d + 1, &mut rng)?;
        let site = rng.gen_range(0..cfg.n);
        p.push_block(c, vec![RotationGate::t(site)])?;
    }
    Ok(p)
}

/// Each period: a random U(1) Clifford, then `R^x_j(π + 2ε)` on every qubit.
pub fn sample_floquet_program(cfg: &FloquetConfig, id: usize) -> Result<Program> {
    let mut rng = realization_rng(cfg.seed, id);
    let mut p = Program::new(cfg.n);
    let theta = PI + 2.0 * cfg.epsilon;
    for _ in 0..cfg.periods {
        let c = sample_u1_clifford(cfg.n, &mut rng)?;
        let kicks = (0..cfg.n).map(|j| RotationGate::new(j, PauliIndex::X, theta)).collect::<Result<Vec<_>>>()?;
        p.push_block(c, kicks)?;
    }
    Ok(p)
}

/// `Z_j` for every qubit; their mean is `M_z/N`.
pub fn magnetization_observables(n: usize) -> Vec<PauliString> {
    (0..n).map(|j| PauliString::single(n, j, PauliIndex::Z).expect("in range")).collect()
}

/// Temporal-entropy grid for every prefix `m = 1..M` of the compiled program.
pub fn temporal_grid(
    program: &Program,
    bits: &[u8],
    observable: &PauliString,
    policy: &TruncationPolicy,
    mode: AuxMode,
) -> Result<Vec<Vec<f64>>> {
    let mut circuit = StabMpoCircuit::new(program.num_qubits());
    let mut grid = Vec::new();
    for block in program.blocks() {
        circuit.append_clifford(&block.clifford)?;
        for r in &block.rotations {
            circuit.push_rotation(r)?;
        }
        grid.push(horizontal_contract(&circuit, observable, bits, policy, mode)?.entropy);
    }
    Ok(grid)
}

pub fn tdoped_realization(cfg: &TDopedConfig, id: usize) -> Result<RealizationResult> {
    let program = sample_tdoped_program(cfg, id)?;
    let bits = vec![0u8; cfg.n];
    let obs = [cfg.observable()?];
    let policy = cfg.policy();
    let mut tracks = vec![(Track::StabMpo, run_stab_track(&program, &bits, &obs, &policy)?)];
    if cfg.run_baseline {
        tracks.push((Track::Baseline, run_baseline_track(&program, &bits, &obs, &policy)?));
    }
    let temporal =
        if cfg.run_temporal { Some(temporal_grid(&program, &bits, &obs[0], &policy, cfg.aux_mode)?) } else { None };
    Ok(RealizationResult { id, tracks, temporal })
}

pub fn floquet_realization(cfg: &FloquetConfig, id: usize) -> Result<RealizationResult> {
    let program = sample_floquet_program(cfg, id)?;
    let records = run_stab_track(&program, &vec![0; cfg.n], &magnetization_observables(cfg.n), &cfg.policy())?;
    Ok(RealizationResult { id, tracks: vec![(Track::StabMpo, records)], temporal: None })
}

/// Worker pool sized by [`WORKERS_ENV`] (default: rayon's choice).
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let k: usize = v.trim().parse().map_err(|_| Error::Config(format!("{WORKERS_ENV} must be a positive integer")))?;
        b = b.num_threads(k.max(1));
    }
    b.build().map_err(|e| Error::Config(e.to_string()))
}

/// Runs `f` for ids `0..count` in parallel; results come back ordered by id.
pub fn run_realizations<T: Send>(count: usize, f: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    worker_pool()?.install(|| (0..count).into_par_iter().map(&f).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRow {
    pub m: usize,
    pub track: Track,
    pub n_samples: usize,
    pub entropy: (f64, f64),
    pub observable: (f64, f64),
    pub reference: Option<f64>,
}

/// Everything a run writes to disk.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub meta: Vec<(String, String)>,
    pub realizations: Vec<RealizationResult>,
    pub aggregate: Vec<AggregateRow>,
    pub temporal: Option<Vec<Vec<f64>>>,
}

fn aggregate(realizations: &[RealizationResult], reference: impl Fn(usize) -> Option<f64>) -> Vec<AggregateRow> {
    let Some(first) = realizations.first() else { return Vec::new() };
    let mut rows = Vec::new();
    for (track, recs) in &first.tracks {
        for m in 0..recs.len() {
            let pick = |f: fn(&StepRecord) -> f64| -> Vec<f64> {
                realizations.iter().filter_map(|r| r.track(*track)).map(|t| f(&t[m])).collect()
            };
            let ent = pick(|s| s.entropy);
            rows.push(AggregateRow {
                m,
                track: *track,
                n_samples: ent.len(),
                entropy: mean_stderr(&ent),
                observable: mean_stderr(&pick(|s| s.observable)),
                reference: reference(m),
            });
        }
    }
    rows
}

fn mean_grid(realizations: &[RealizationResult]) -> Option<Vec<Vec<f64>>> {
    let grids: Vec<&Vec<Vec<f64>>> = realizations.iter().filter_map(|r| r.temporal.as_ref()).collect();
    let first = grids.first()?;
    let k = grids.len() as f64;
    Some(
        (0..first.len())
            .map(|m| (0..first[m].len()).map(|n| grids.iter().map(|g| g[m][n]).sum::<f64>() / k).collect())
            .collect(),
    )
}

fn meta_header(experiment: &str, cfg: &impl ExperimentConfig, n: usize) -> Vec<(String, String)> {
    let mut meta = vec![
        ("experiment".to_string(), experiment.to_string()),
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ];
    meta.extend(cfg.entries().into_iter().map(|(k, v)| (k.to_string(), v)));
    meta.push(("entropy_units".into(), "bits".into()));
    meta.push(("half_chain_cut".into(), n.div_ceil(2).to_string()));
    meta.push(("initial_state".into(), "all zeros".into()));
    meta
}

pub fn run_tdoped(cfg: &TDopedConfig) -> Result<RunResult> {
    cfg.validate()?;
    let realizations = run_realizations(cfg.realizations, |id| tdoped_realization(cfg, id))?;
    let mut meta = meta_header("tdoped", cfg, cfg.n);
    if cfg.run_temporal {
        meta.push(("temporal_cut".into(), "middle auxiliary bond ceil(rows/2)".into()));
    }
    Ok(RunResult {
        aggregate: aggregate(&realizations, |_| None),
        temporal: mean_grid(&realizations),
        meta,
        realizations,
    })
}

pub fn run_floquet(cfg: &FloquetConfig) -> Result<RunResult> {
    cfg.validate()?;
    let realizations = run_realizations(cfg.realizations, |id| floquet_realization(cfg, id))?;
    let mut meta = meta_header("floquet", cfg, cfg.n);
    meta.push(("observable".into(), "M_z/N = mean_j <Z_j>".into()));
    let eps = cfg.epsilon;
    Ok(RunResult {
        aggregate: aggregate(&realizations, |m| Some(analytic_magnetization(eps, m))),
        temporal: None,
        meta,
        realizations,
    })
}

fn num(x: f64) -> String {
    format!("{x:.15e}")
}

impl RunResult {
    pub fn meta_text(&self) -> String {
        self.meta.iter().fold(String::new(), |mut s, (k, v)| {
            let _ = writeln!(s, "{k} = {v}");
            s
        })
    }

    pub fn trajectory_csv(&self) -> String {
        let mut s = String::from("realization,m,track,entropy_bits,observable,max_bond,cum_truncation_error,zero_state\n");
        for r in &self.realizations {
            for (track, recs) in &r.tracks {
                for x in recs {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{},{}",
                        r.id,
                        x.m,
                        track.name(),
                        num(x.entropy),
                        num(x.observable),
                        x.max_bond,
                        num(x.cum_truncation),
                        x.zero_state as u8
                    );
                }
            }
        }
        s
    }

    pub fn aggregate_csv(&self) -> String {
        let mut s = String::from(
            "m,track,n_samples,entropy_mean,entropy_stderr,observable_mean,observable_stderr,reference\n",
        );
        for a in &self.aggregate {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{}",
                a.m,
                a.track.name(),
                a.n_samples,
                num(a.entropy.0),
                num(a.entropy.1),
                num(a.observable.0),
                num(a.observable.1),
                a.reference.map(num).unwrap_or_default()
            );
        }
        s
    }

    pub fn temporal_csv(&self) -> Option<String> {
        let grid = self.temporal.as_ref()?;
        let mut buf = Vec::new();
        write_entropy_csv(grid, &mut buf).ok()?;
        String::from_utf8(buf).ok()
    }

    /// Writes `meta.txt`, `trajectory.csv`, `aggregate.csv` and, when
    /// present, `temporal.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let put = |name: &str, body: &str| -> Result<()> {
            let mut f = std::fs::File::create(dir.join(name))?;
            f.write_all(body.as_bytes())?;
            Ok(())
        };
        put("meta.txt", &self.meta_text())?;
        put("trajectory.csv", &self.trajectory_csv())?;
        put("aggregate.csv", &self.aggregate_csv())?;
        if let Some(t) = self.temporal_csv() {
            put("temporal.csv", &t)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::program::{dense_mean_expectation, dense_oracle_run};

    #[test]
    fn analytic_values() {
        assert_eq!(analytic_magnetization(0.0, 3), -1.0);
        assert!(analytic_magnetization(PI / 4.0, 1).abs() < 1e-16);
        assert!((analytic_magnetization(0.1, 5) + 0.2f64.cos().powi(5)).abs() < 1e-15);
        assert_eq!(analytic_magnetization(0.3, 0), 1.0);
    }

    #[test]
    fn stderr_scales_with_sample_count() {
        let make = |k: usize| -> Vec<f64> { (0..k).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect() };
        let (m1, s1) = mean_stderr(&make(100));
        let (_, s4) = mean_stderr(&make(400));
        assert!(m1.abs() < 1e-15);
        assert!((s1 / s4 - 2.0).abs() < 0.02);
        assert_eq!(mean_stderr(&[3.0]), (3.0, 0.0));
        assert_eq!(mean_stderr(&[2.0; 10]).1, 0.0);
    }

    #[test]
    fn realization_streams_are_stable() {
        let cfg = TDopedConfig { n: 6, m_layers: 3, ..Default::default() };
        let a = sample_tdoped_program(&cfg, 4).unwrap();
        let b = sample_tdoped_program(&TDopedConfig { realizations: 99, ..cfg.clone() }, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_tdoped_program(&cfg, 5).unwrap());
    }

    #[test]
    fn tdoped_tracks_agree_at_exact_chi() {
        let cfg = TDopedConfig { n: 6, m_layers: 4, chi: 1 << 10, run_baseline: true, ..Default::default() };
        for id in 0..3 {
            let r = tdoped_realization(&cfg, id).unwrap();
            let program = sample_tdoped_program(&cfg, id).unwrap();
            let states = dense_oracle_run(&program, &[0; 6]).unwrap();
            let obs = [cfg.observable().unwrap()];
            for (k, st) in states.iter().enumerate() {
                let want = dense_mean_expectation(st, &obs).unwrap();
                assert!((r.track(Track::StabMpo).unwrap()[k].observable - want).abs() < 1e-8);
                let base = &r.track(Track::Baseline).unwrap()[k];
                assert!((base.observable - want).abs() < 1e-8);
                assert!((base.entropy - st.entropy(3)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn no_blocks_means_no_entropy() {
        let cfg = TDopedConfig { n: 8, m_layers: 0, ..Default::default() };
        let r = tdoped_realization(&cfg, 0).unwrap();
        let recs = r.track(Track::StabMpo).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].entropy, 0.0);
    }

    #[test]
    fn perfect_kicks_flip_magnetization() {
        let cfg = FloquetConfig { n: 9, epsilon: 0.0, periods: 6, realizations: 1, ..Default::default() };
        let r = floquet_realization(&cfg, 0).unwrap();
        for s in r.track(Track::StabMpo).unwrap() {
            let want = if s.m % 2 == 0 { 1.0 } else { -1.0 };
            assert!((s.observable - want).abs() < 1e-12);
            assert_eq!(s.entropy, 0.0);
            assert_eq!(s.max_bond, 1);
        }
    }

    #[test]
    fn floquet_matches_dense_evolution() {
        let cfg = FloquetConfig { n: 6, epsilon: 0.3, periods: 4, chi: 1 << 10, realizations: 1, ..Default::default() };
        let r = floquet_realization(&cfg, 0).unwrap();
        let program = sample_floquet_program(&cfg, 0).unwrap();
        let states = dense_oracle_run(&program, &[0; 6]).unwrap();
        let obs = magnetization_observables(6);
        for (s, st) in r.track(Track::StabMpo).unwrap().iter().zip(&states) {
            assert!((s.observable - dense_mean_expectation(st, &obs).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn csv_bodies_are_deterministic() {
        let cfg = TDopedConfig {
            n: 6,
            m_layers: 3,
            chi: 8,
            realizations: 3,
            run_baseline: true,
            run_temporal: true,
            ..Default::default()
        };
        let a = run_tdoped(&cfg).unwrap();
        let b = run_tdoped(&cfg).unwrap();
        assert_eq!(a.trajectory_csv(), b.trajectory_csv());
        assert_eq!(a.aggregate_csv(), b.aggregate_csv());
        assert_eq!(a.temporal_csv(), b.temporal_csv());
        assert_eq!(a.trajectory_csv().lines().count(), 1 + 3 * 2 * 4);
        assert_eq!(a.temporal_csv().unwrap().lines().count(), 1 + 3 * 6);
        let dir = tempfile::tempdir().unwrap();
        a.write(dir.path()).unwrap();
        for f in ["meta.txt", "trajectory.csv", "aggregate.csv", "temporal.csv"] {
            assert!(dir.path().join(f).exists());
        }
    }
}
