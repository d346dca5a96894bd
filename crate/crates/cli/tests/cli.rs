use std::path::Path;
use std::process::Command;

fn stabmpo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stabmpo"))
}

fn body(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn selftest_exits_zero() {
    let out = stabmpo().arg("selftest").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn usage_errors_exit_two() {
    for args in [&["tdoped", "--n", "1"][..], &["floquet", "--epsilon", "3"], &["nonsense"], &["tdoped", "--chi", "x"]] {
        assert_eq!(stabmpo().args(args).output().unwrap().status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn floquet_is_deterministic_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for (k, workers) in ["1", "3"].into_iter().enumerate() {
        let dir = tmp.path().join(k.to_string());
        let status = stabmpo()
            .env("STABMPO_WORKERS", workers)
            .args(["floquet", "--n", "6", "--epsilon", "0.1", "--periods", "4", "--realizations", "5", "--seed", "7"])
            .arg("--out")
            .arg(&dir)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        bodies.push((body(&dir, "trajectory.csv"), body(&dir, "aggregate.csv")));
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(&cfg, "n = 6\nm_layers = 2\nrealizations = 2\nseed = 3\n").unwrap();
    let out = tmp.path().join("out");
    let status = stabmpo()
        .args(["tdoped", "--baseline", "--chi", "8", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let meta = body(&out, "meta.txt");
    assert!(meta.contains("n = 6") && meta.contains("chi = 8") && meta.contains("run_baseline = true"), "{meta}");
    let traj = body(&out, "trajectory.csv");
    assert!(traj.contains(",baseline,") && traj.contains(",stab_mpo,"));
}

#[test]
fn compile_prints_layers() {
    let tmp = tempfile::tempdir().unwrap();
    let prog = tmp.path().join("p.txt");
    std::fs::write(&prog, "qubits 2\nH 0\nCNOT 0 1\nT 1\n").unwrap();
    let out = stabmpo().arg("compile").arg(&prog).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("qubits 2\nlayers 1\n"), "{text}");
}
