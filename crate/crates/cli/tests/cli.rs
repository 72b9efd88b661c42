use std::process::Command;

fn eit_forge() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_eit-forge"));
    c.env_remove("EIT_FORGE_THREADS");
    c
}

#[test]
fn optimize_writes_holes_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("opt.cfg");
    std::fs::write(&cfg, "mode=optimize\nn_holes=2\nn_nodes=401\ngrid_points=121\noutput_prefix=run\n").unwrap();
    let out = eit_forge().arg(&cfg).current_dir(dir.path()).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let holes = std::fs::read_to_string(dir.path().join("run_holes.csv")).unwrap();
    let mut lines = holes.lines();
    assert_eq!(lines.next(), Some("center_mhz,depth,hwhm_mhz,profile"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.ends_with(",0.800000000,10.000000000,gaussian")));

    let report = std::fs::read_to_string(dir.path().join("run_report.txt")).unwrap();
    for key in ["contrast=", "seed_contrast=", "base_contrast=", "converged=", "iterations=", "evaluations="] {
        assert!(report.contains(key), "{report}");
    }
}

#[test]
fn thread_setting_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("roots.cfg");
    std::fs::write(&cfg, "mode=roots\n").unwrap();
    let ok = eit_forge().arg(&cfg).env("EIT_FORGE_THREADS", "2").output().unwrap();
    assert!(ok.status.success());
    let bad = eit_forge().arg(&cfg).env("EIT_FORGE_THREADS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("EIT_FORGE_THREADS"));
    let zero = eit_forge().arg(&cfg).args(["--threads", "0"]).output().unwrap();
    assert_eq!(zero.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(eit_forge().output().unwrap().status.code(), Some(2));
    assert_eq!(eit_forge().arg("missing.cfg").output().unwrap().status.code(), Some(1));
}
