use std::path::Path;
use std::process::{Command, Output};

use cylris::harness::ScenarioConfig;

fn cylris(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cylris")).args(args).output().unwrap()
}

fn small_config(dir: &Path) -> String {
    let cfg = ScenarioConfig {
        ris_layers: 2,
        ris_ring: 8,
        upa_rows: 2,
        upa_cols: 4,
        bs_antennas: 4,
        layer_sweep: vec![1, 2],
        ring_sweep: vec![4, 8],
        azimuth_sweep_deg: vec![0.0, 45.0],
        bench_azimuth_deg: vec![20.0],
        ..ScenarioConfig::default()
    };
    let path = dir.join("small.cfg");
    std::fs::write(&path, cfg.emit()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn default_config_parses_back() {
    let out = cylris(&["default-config"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(ScenarioConfig::parse(&text).unwrap(), ScenarioConfig::default());
}

#[test]
fn every_subcommand_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let cases: [(&[&str], &str); 4] = [
        (&["sweep-azimuth"], "layers,ring,uav_azimuth_deg"),
        (&["sweep-nr"], "layers,ring,uca_elements"),
        (&["bench-iters", "--trials", "3"], "uav_azimuth_deg,shared"),
        (&["validate", "--trials", "200"], "user,quantity,analytic"),
    ];
    for (i, (args, header)) in cases.iter().enumerate() {
        let out_path = dir.path().join(format!("{i}.csv"));
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--config", &cfg, "--seed", "3", "--out", out_path.to_str().unwrap()]);
        let out = cylris(&full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        let csv = std::fs::read_to_string(&out_path).unwrap();
        assert!(csv.starts_with(header), "{csv}");
        assert!(csv.lines().count() >= 2);
    }
}

#[test]
fn same_seed_gives_same_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let run = |seed: &str, name: &str| {
        let p = dir.path().join(name);
        let out = cylris(&["bench-iters", "--trials", "2", "--config", &cfg, "--seed", seed, "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
        std::fs::read_to_string(p).unwrap()
    };
    assert_eq!(run("1", "a.csv"), run("1", "b.csv"));
}

#[test]
fn config_error_exit_code_and_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "seed = 1\nrician_k_uav_db = 13dB\n").unwrap();
    let out = cylris(&["sweep-nr", "--config", bad.to_str().unwrap(), "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("rician_k_uav_db"), "{err}");
}

#[test]
fn missing_file_and_usage_exit_codes() {
    let out = cylris(&["sweep-nr", "--config", "/nonexistent/x.cfg", "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(4));
    let out = cylris(&["sweep-nr"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cylris(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn too_few_trials_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = cylris(&["validate", "--trials", "1", "--config", &cfg, "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(3));
}
