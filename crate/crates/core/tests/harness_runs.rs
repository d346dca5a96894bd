use stabmpo::harness::{run_floquet, run_tdoped, FloquetConfig, TDopedConfig, Track};

fn small_tdoped(realizations: usize) -> TDopedConfig {
    TDopedConfig { n: 6, m_layers: 3, chi: 16, realizations, seed: 9, run_baseline: true, ..Default::default() }
}

#[test]
fn repeated_runs_give_identical_csv() {
    let a = run_tdoped(&small_tdoped(4)).unwrap();
    let b = run_tdoped(&small_tdoped(4)).unwrap();
    assert_eq!(a.trajectory_csv(), b.trajectory_csv());
    assert_eq!(a.aggregate_csv(), b.aggregate_csv());
    let f = FloquetConfig { n: 6, periods: 5, realizations: 3, seed: 4, ..Default::default() };
    assert_eq!(run_floquet(&f).unwrap().trajectory_csv(), run_floquet(&f).unwrap().trajectory_csv());
}

#[test]
fn realizations_are_stable_under_count_changes() {
    let few = run_tdoped(&small_tdoped(2)).unwrap();
    let many = run_tdoped(&small_tdoped(5)).unwrap();
    for (a, b) in few.realizations.iter().zip(&many.realizations) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.track(Track::StabMpo), b.track(Track::StabMpo));
    }
}

#[test]
fn temporal_grid_is_written() {
    let cfg = TDopedConfig { run_temporal: true, realizations: 2, ..small_tdoped(2) };
    let r = run_tdoped(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    r.write(dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("temporal.csv")).unwrap();
    assert!(text.starts_with("n,m,entropy_bits\n"));
    assert!(text.lines().count() > 1);
    for f in ["meta.txt", "trajectory.csv", "aggregate.csv"] {
        assert!(dir.path().join(f).exists());
    }
}
