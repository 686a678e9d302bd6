use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fpplab::harness::DEFAULT_THRESHOLDS;
use serde_json::Value;

fn fpplab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpplab"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .env_remove("FPPLAB_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_writes_edges_metadata_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = fpplab(dir.path(), &["generate", "--model", "ust", "--n", "200", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let g = fpplab::graphcore::read_edge_list_file(&dir.path().join("graph.edges")).unwrap();
    assert_eq!(g.n(), 200);
    let meta = json(&dir.path().join("graph.meta.json"));
    assert_eq!(meta["master_seed"], 3);
    assert_eq!(meta["n"], 200);
    let manifest = json(&dir.path().join("manifest.json"));
    assert_eq!(manifest["command"], "generate");
    assert_eq!(manifest["config"]["seed"], 3);
}

#[test]
fn conditioned_gw_metadata_counts_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["generate", "--model", "gw-conditioned", "--offspring", "poisson1", "--depth", "30", "--seed", "7"];
    assert_eq!(code(&fpplab(dir.path(), &args)), 0);
    let meta = json(&dir.path().join("graph.meta.json"));
    assert!(meta["stats"]["attempts"].as_u64().unwrap() >= 1, "{meta}");
}

#[test]
fn kappa_of_star_and_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let star = dir.path().join("star.edges");
    let edges: String = (1..10).map(|v| format!("0 {v}\n")).collect();
    fs::write(&star, format!("10 9 0\n{edges}")).unwrap();
    let o = fpplab(dir.path(), &["kappa", star.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("kappa = 9"));

    let cycle = dir.path().join("cycle.edges");
    fs::write(&cycle, "4 4 0\n0 1\n1 2\n2 3\n3 0\n").unwrap();
    let o = fpplab(dir.path(), &["kappa", cycle.to_str().unwrap()]);
    assert!(stdout(&o).contains("kappa = 4"));
    assert!(stdout(&o).contains("no bridges"));
}

#[test]
fn kappa_per_vertex_on_barbell() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("barbell.edges");
    fs::write(&f, "6 7 0\n0 1\n1 2\n2 0\n2 3\n3 4\n4 5\n5 3\n").unwrap();
    let o = fpplab(dir.path(), &["kappa", f.to_str().unwrap(), "--per-vertex"]);
    assert_eq!(code(&o), 0);
    let report = json(&dir.path().join("kappa.json"));
    assert_eq!(report["argmax"]["kappa"], 3);
    assert!(report["argmax"]["vertex"].as_u64().unwrap() < 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.edges");
    fs::write(&bad, "3 2 0\n0 1\n1 x\n").unwrap();
    let o = fpplab(dir.path(), &["kappa", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));

    assert_eq!(code(&fpplab(dir.path(), &["experiment", "no-such-thing"])), 1);
    assert_eq!(code(&fpplab(dir.path(), &["generate", "--model", "path"])), 1);
    assert_eq!(code(&fpplab(dir.path(), &["generate", "--model", "path", "--n", "5", "--lambda", "1"])), 1);
    assert_eq!(code(&fpplab(dir.path(), &["frobnicate"])), 1);
    assert_eq!(code(&fpplab(dir.path(), &["--help"])), 0);
    let big = ["generate", "--model", "gw-conditioned", "--offspring", "poisson1", "--depth", "200", "--size-cap", "20"];
    assert_eq!(code(&fpplab(dir.path(), &big)), 3);
}

#[test]
fn failing_experiment_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let strict = dir.path().join("strict.toml");
    fs::write(
        &strict,
        DEFAULT_THRESHOLDS.replace("cycle_slope_tolerance = { value = 0.15", "cycle_slope_tolerance = { value = 0.0"),
    )
    .unwrap();
    let args = [
        "--thresholds",
        strict.to_str().unwrap(),
        "experiment",
        "cycle-scaling",
        "--n",
        "64",
        "--runs",
        "200",
        "--set",
        "k_lo=4",
        "--set",
        "k_hi=32",
    ];
    let o = fpplab(dir.path(), &args);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&dir.path().join("cycle-scaling.json"));
    assert_eq!(report["verdict"], "fail");
    assert_eq!(report["params"]["k_hi"], 32);
}

#[test]
fn manifest_replay_reproduces_the_curve() {
    let first = tempfile::tempdir().unwrap();
    let args = [
        "curve", "--model", "gw-conditioned", "--offspring", "poisson1", "--depth", "12", "--runs", "300", "--seed", "5",
    ];
    assert_eq!(code(&fpplab(first.path(), &args)), 0);
    let csv = fs::read(first.path().join("curve.csv")).unwrap();

    let second = tempfile::tempdir().unwrap();
    let manifest = first.path().join("manifest.json");
    let o = fpplab(second.path(), &["curve", "--config", manifest.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(second.path().join("curve.csv")).unwrap(), csv);
    assert_eq!(
        fs::read(second.path().join("plateau.json")).unwrap(),
        fs::read(first.path().join("plateau.json")).unwrap()
    );

    let third = tempfile::tempdir().unwrap();
    let mut with_workers = vec!["--workers", "3"];
    with_workers.extend(args);
    assert_eq!(code(&fpplab(third.path(), &with_workers)), 0);
    assert_eq!(fs::read(third.path().join("curve.csv")).unwrap(), csv);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "seed = 4\n\n[generate]\nmodel = \"cycle\"\nn = 12\n").unwrap();
    assert_eq!(code(&fpplab(dir.path(), &["--config", cfg.to_str().unwrap(), "generate"])), 0);
    assert_eq!(json(&dir.path().join("graph.meta.json"))["n"], 12);
    let o = fpplab(dir.path(), &["--config", cfg.to_str().unwrap(), "generate", "--n", "20"]);
    assert_eq!(code(&o), 0);
    let meta = json(&dir.path().join("graph.meta.json"));
    assert_eq!((meta["n"].as_u64(), meta["master_seed"].as_u64()), (Some(20), Some(4)));

    fs::write(&cfg, "[generate]\nmodel = \"cycle\"\nn = 12\ncolour = \"red\"\n").unwrap();
    assert_eq!(code(&fpplab(dir.path(), &["--config", cfg.to_str().unwrap(), "generate"])), 1);
}
