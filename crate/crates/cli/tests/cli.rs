/*
Copyright 2026 The distpd Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const RIDGE: &str = r#"
name = "ridge"
seed = 7

[data]
source = "synthetic"
n = 60
d = 10
workers = 3

[solver]
rule = "proximal1"
rounds = 30
"#;

fn distpd() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_distpd"));
    c.env_remove("DISTPD_OUT");
    c
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn solve(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    run(distpd()
        .args(["solve", "--config"])
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .args(extra))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines
        .next()
        .unwrap()
        .split(',')
        .position(|h| h == name)
        .unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

fn numbers(csv: &str, name: &str) -> Vec<f64> {
    column(csv, name).iter().map(|s| s.parse().unwrap()).collect()
}

fn strip_nulls(v: Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(
            m.into_iter()
                .filter(|(_, v)| !v.is_null())
                .map(|(k, v)| (k, strip_nulls(v)))
                .collect(),
        ),
        other => other,
    }
}

#[test]
fn zero_rounds_writes_header_and_initial_objectives() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "r.toml", RIDGE);
    let out = solve(&cfg, tmp.path(), &["--rounds", "0"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("ridge.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("round,primal,dual,gap,relative_gap,inner_residual,scalars,elapsed"));
    let s = read_json(&tmp.path().join("ridge.summary.json"));
    assert_eq!(s["rounds_completed"], 0);
    assert!(s["initial"]["primal"].as_f64().unwrap() > 0.0);
    assert_eq!(s["status"], "completed");
}

#[test]
fn runs_are_byte_reproducible_and_seed_overrides_are_recorded() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "r.toml", RIDGE);
    let (a, b, c) = (tmp.path().join("a"), tmp.path().join("b"), tmp.path().join("c"));
    for dir in [&a, &b] {
        assert_eq!(code(&solve(&cfg, dir, &[])), 0);
    }
    for f in ["ridge.csv", "ridge.summary.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    assert_eq!(code(&solve(&cfg, &c, &["--seed", "8"])), 0);
    assert_ne!(fs::read(a.join("ridge.csv")).unwrap(), fs::read(c.join("ridge.csv")).unwrap());
    let s = read_json(&c.join("ridge.summary.json"));
    assert_eq!(s["seed"], 8);
    assert_eq!(s["config"]["seed"], 8);
}

#[test]
fn summary_config_replays_the_run() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "r.toml", RIDGE);
    let first = tmp.path().join("first");
    assert_eq!(code(&solve(&cfg, &first, &["--seed", "11", "--rounds", "12"])), 0);
    let s = read_json(&first.join("ridge.summary.json"));
    let replay = toml::to_string(&strip_nulls(s["config"].clone())).unwrap();
    let cfg2 = write_config(tmp.path(), "replay.toml", &replay);
    let second = tmp.path().join("second");
    assert_eq!(code(&solve(&cfg2, &second, &[])), 0);
    assert_eq!(
        fs::read(first.join("ridge.csv")).unwrap(),
        fs::read(second.join("ridge.csv")).unwrap()
    );
}

#[test]
fn verify_exit_codes() {
    for check in ["cor1", "lemma1", "moreau"] {
        let out = run(distpd().args(["verify", check, "--count", "20", "--rounds", "20"]));
        assert_eq!(code(&out), 0, "{check}: {}", String::from_utf8_lossy(&out.stdout));
        assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    }
    let out = run(distpd().args(["verify", "cor2a", "--json", "--rounds", "10"]));
    assert_eq!(code(&out), 0);
    let rep: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["passed"], true);

    let tmp = TempDir::new().unwrap();
    let big = write_config(
        tmp.path(),
        "big.toml",
        "[data]\nsource = \"synthetic\"\nn = 3000\nd = 5\nworkers = 3\n",
    );
    let out = run(distpd().args(["verify", "ppm", "--config"]).arg(&big));
    assert_eq!(code(&out), 2);
    let out = run(distpd().args(["verify", "moreau", "--count", "0"]));
    assert_eq!(code(&out), 2);
}

#[test]
fn single_point_sweep_matches_solve() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "r.toml", RIDGE);
    assert_eq!(code(&solve(&cfg, tmp.path(), &[])), 0);
    let out = run(distpd()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .args(["--grid", "rule=proximal1", "--out"])
        .arg(tmp.path()));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        fs::read(tmp.path().join("ridge.csv")).unwrap(),
        fs::read(tmp.path().join("ridge-000.csv")).unwrap()
    );
    let idx = read_json(&tmp.path().join("ridge.index.json"));
    assert_eq!(idx["points"].as_array().unwrap().len(), 1);
}

#[test]
fn sweep_at_matching_rho_tracks_cocoa_duals() {
    let tmp = TempDir::new().unwrap();
    // λ defaults to 1/n = 1/60, so ρ = 60 is the matching step
    let cfg = write_config(tmp.path(), "r.toml", RIDGE);
    let out = run(distpd()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .args(["--grid", "rule=cocoa,proximal1", "--grid", "rho=60", "--jobs", "2", "--out"])
        .arg(tmp.path()));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let idx = read_json(&tmp.path().join("ridge.index.json"));
    let pts = idx["points"].as_array().unwrap();
    let trace = |rule: &str| {
        let p = pts.iter().find(|p| p["params"]["rule"] == rule).unwrap();
        fs::read_to_string(tmp.path().join(p["trace"].as_str().unwrap())).unwrap()
    };
    let (cocoa, prox) = (trace("cocoa"), trace("proximal1"));
    let (dc, dp) = (numbers(&cocoa, "dual"), numbers(&prox, "dual"));
    assert_eq!(dc.len(), 30);
    for (a, b) in dc.iter().zip(&dp) {
        assert!((a - b).abs() <= 1e-10 * (1.0 + a.abs()), "{a} {b}");
    }
}

#[test]
fn small_eta1_is_flagged_not_fatal() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "adv.toml",
        "name = \"adv\"\n[data]\nsource = \"synthetic\"\nn = 60\nd = 10\nworkers = 6\nregime = \"non-iid\"\n[solver]\nrounds = 200\n",
    );
    let out = run(distpd()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .args(["--grid", "eta1=0.01,6", "--out"])
        .arg(tmp.path()));
    assert_eq!(code(&out), 0);
    let idx = read_json(&tmp.path().join("adv.index.json"));
    let pts = idx["points"].as_array().unwrap();
    let bad = &pts[0];
    assert!(bad["non_monotone"] == true || bad["status"] == "diverged", "{bad}");
    assert_eq!(pts[1]["status"], "completed");
}

#[test]
fn generated_data_feeds_info_and_solve() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("d.svm");
    let out = run(distpd()
        .args(["gen-data", "--n", "40", "--d", "8", "--workers", "4", "--seed", "3", "--out"])
        .arg(&data));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(distpd().arg("info").arg(&data).args(["--workers", "4"]));
    assert_eq!(code(&out), 0);
    let info: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(info["n"], 40);
    assert_eq!(info["d"], 8);

    let cfg = write_config(
        tmp.path(),
        "svm.toml",
        "name = \"svm\"\n[data]\nsource = \"libsvm\"\npath = \"d.svm\"\nworkers = 4\n[solver]\nrounds = 10\n",
    );
    assert_eq!(code(&solve(&cfg, tmp.path(), &[])), 0);
    let csv = fs::read_to_string(tmp.path().join("svm.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn inner_stall_exits_three_with_partial_trace() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "stall.toml",
        "[data]\nsource = \"synthetic\"\nn = 60\nd = 10\nworkers = 3\n[problem]\nloss = \"hinge\"\n[solver]\nrounds = 20\n[solver.inner]\nc = 1e-12\nmax_sweeps = 1\n",
    );
    let out = solve(&cfg, tmp.path(), &[]);
    assert_eq!(code(&out), 3);
    assert!(tmp.path().join("run.csv").exists());
    let s = read_json(&tmp.path().join("run.summary.json"));
    assert_eq!(s["status"], "stalled");
    assert!(!s["error"].is_null());
}

#[test]
fn unknown_config_keys_are_named() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.toml",
        "[data]\nsource = \"synthetic\"\nn = 10\nd = 2\nworkers = 2\n[solver]\nrh0 = 1\n",
    );
    let out = solve(&cfg, tmp.path(), &[]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("rh0"));
    let out = solve(&tmp.path().join("missing.toml"), tmp.path(), &[]);
    assert_eq!(code(&out), 2);
}

#[test]
fn output_directory_falls_back_to_environment() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "r.toml", RIDGE);
    let env_dir = tmp.path().join("env");
    let out = run(distpd()
        .env("DISTPD_OUT", &env_dir)
        .args(["solve", "--rounds", "2", "--config"])
        .arg(&cfg));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(env_dir.join("ridge.csv").exists());
}

#[test]
fn timing_fills_elapsed_column() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "r.toml", RIDGE);
    let (plain, timed) = (tmp.path().join("p"), tmp.path().join("t"));
    assert_eq!(code(&solve(&cfg, &plain, &["--rounds", "3"])), 0);
    assert_eq!(code(&solve(&cfg, &timed, &["--rounds", "3", "--timing"])), 0);
    let p = fs::read_to_string(plain.join("ridge.csv")).unwrap();
    let t = fs::read_to_string(timed.join("ridge.csv")).unwrap();
    assert!(column(&p, "elapsed").iter().all(String::is_empty));
    assert!(numbers(&t, "elapsed").iter().all(|&e| e >= 0.0));
}

#[test]
fn jsonl_output_has_one_record_per_round() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "r.toml", &format!("{RIDGE}\n[output]\nformat = \"jsonl\"\n"));
    assert_eq!(code(&solve(&cfg, tmp.path(), &["--rounds", "4"])), 0);
    let text = fs::read_to_string(tmp.path().join("ridge.jsonl")).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 4);
    assert_eq!(recs[3]["round"], 4);
}
