use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wsr_minimax::experiment::{run_experiment, RunMode};

fn wsr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsr-minimax")).args(args).output().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    fs::write(&path, format!("format_version = 1\n{body}")).unwrap();
    path.to_str().unwrap().to_string()
}

/// First channel entry of a one-link network file.
fn scalar_channel(network: &str) -> (f64, f64) {
    let mut lines = network.lines().skip_while(|l| !l.starts_with("channel 0 0"));
    lines.next().unwrap();
    let v: Vec<f64> = lines.next().unwrap().split_whitespace().map(|t| t.parse().unwrap()).collect();
    (v[0], v[1])
}

#[test]
fn single_link_matches_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "links = 1\ntx_antennas = 1\nrx_antennas = 1\nweight_min = 1.0\nweight_max = 1.0\ntotal_power = 3.0\nseeds = [5]\n",
    );
    let out = wsr(&["solve", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("wsr-out/alpha_1_seed_5");
    let (re, im) = scalar_channel(&fs::read_to_string(run.join("network.txt")).unwrap());
    let summary = json(&run.join("summary.json"));
    let expected = (1.0 + (re * re + im * im) * 3.0).ln();
    assert!((summary["objective_nats"].as_f64().unwrap() - expected).abs() < 1e-8);
}

#[test]
fn empty_seed_list_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = wsr(&["solve", "--seeds", "", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "links = \"ten\"\n");
    assert_eq!(wsr(&["solve", "--config", &cfg]).status.code(), Some(1));
    let missing = dir.path().join("nope.toml");
    assert_eq!(wsr(&["solve", "--config", missing.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(wsr(&["solve", "--bogus"]).status.code(), Some(1));
}

#[test]
fn unsupported_certificate_mode_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "links = 4\ntx_antennas = 2\nrx_antennas = 2\nconstraint = \"grouped\"\n");
    assert_eq!(wsr(&["certify", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn runs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let cfg = write_config(d.path(), "links = 4\ntx_antennas = 2\nrx_antennas = 2\nseeds = [11]\n");
        assert!(wsr(&["solve", "--config", &cfg]).status.success());
    }
    let run = |d: &tempfile::TempDir| d.path().join("wsr-out/alpha_1_seed_11");
    assert_eq!(fs::read(run(&a).join("network.txt")).unwrap(), fs::read(run(&b).join("network.txt")).unwrap());
    let oa = json(&run(&a).join("summary.json"))["objective_nats"].as_f64().unwrap();
    let ob = json(&run(&b).join("summary.json"))["objective_nats"].as_f64().unwrap();
    assert!((oa - ob).abs() <= 1e-12);
}

#[test]
fn reference_trace_is_nondecreasing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert!(wsr(&["solve", "--seeds", "3", "--alpha", "1", "--out", out]).status.success());
    let mut r = csv::Reader::from_path(dir.path().join("alpha_1_seed_3/trace.csv")).unwrap();
    let col = r.headers().unwrap().iter().position(|h| h == "objective_nats").unwrap();
    let obj: Vec<f64> = r.records().map(|rec| rec.unwrap()[col].parse().unwrap()).collect();
    assert!(obj.len() > 1);
    assert!(obj.windows(2).all(|w| w[1] >= w[0] - 1e-10));
}

#[test]
fn sweep_writes_an_aggregate_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "links = 3\ntx_antennas = 2\nrx_antennas = 2\nseeds = [1, 2]\nalphas = [0.1, 2.0]\n",
    );
    assert!(wsr(&["sweep", "--config", &cfg]).status.success());
    let mut r = csv::Reader::from_path(dir.path().join("wsr-out/sweep.csv")).unwrap();
    assert_eq!(r.records().count(), 4);
}

#[test]
fn certify_writes_a_passing_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "links = 3\ntx_antennas = 2\nrx_antennas = 3\nseeds = [4]\n");
    let out = wsr(&["certify", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("wsr-out/alpha_1_seed_4");
    assert!(run.join("reverse_network.txt").exists());
    assert_eq!(json(&run.join("certificate.json"))["verdict"], "pass");
}

#[test]
fn experiment_from_a_network_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "links = 2\ntx_antennas = 2\nrx_antennas = 2\nseeds = [8]\nout_dir = \"first\"\n");
    let first = run_experiment(Path::new(&cfg)).unwrap();
    let net = first.runs[0].dir.join("network.txt");
    let cfg = write_config(
        dir.path(),
        &format!("network_file = {:?}\nout_dir = \"second\"\n", net.to_str().unwrap()),
    );
    let second = run_experiment(Path::new(&cfg)).unwrap();
    assert_eq!(second.mode, RunMode::Solve);
    assert_eq!(second.runs.len(), 1);
    assert_eq!(second.runs[0].seed, Some(8));
    assert!((second.runs[0].objective - first.runs[0].objective).abs() < 1e-12);
}
