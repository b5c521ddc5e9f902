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

//! Parameter sweeps: the cartesian product of `key=v1,v2,…` axes applied to
//! a template configuration, one trace per point plus an index.

use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::commands::{run_paths, solve};
use crate::config::ExperimentConfig;
use crate::CliError;

const KEYS: [&str; 7] = ["rule", "rho", "beta", "eta1", "eta2", "tau", "lambda"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

impl std::str::FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let (key, values) = s
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("grid axis '{s}' is not key=v1,v2,...")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::Config(format!(
                "grid key '{key}' is not one of {}",
                KEYS.join(", ")
            )));
        }
        let values: Vec<String> = values
            .split(',')
            .map(|v| v.trim().to_string())
            .filter(|v| !v.is_empty())
            .collect();
        if values.is_empty() {
            return Err(CliError::Config(format!("grid axis '{key}' has no values")));
        }
        if key != "rule" {
            for v in &values {
                v.parse::<f64>()
                    .map_err(|_| CliError::Config(format!("grid {key}: '{v}' is not a number")))?;
            }
        }
        Ok(Axis {
            key: key.to_string(),
            values,
        })
    }
}

/// Grid points in row-major order, the first axis varying slowest.
pub fn points(axes: &[Axis]) -> Vec<Vec<(String, String)>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push((axis.key.clone(), v.clone()));
                    p
                })
            })
            .collect();
    }
    out
}

fn apply(cfg: &mut ExperimentConfig, key: &str, value: &str) {
    let num = || value.parse::<f64>().ok();
    match key {
        "rule" => cfg.solver.rule = value.to_string(),
        "rho" => cfg.solver.rho = num(),
        "beta" => cfg.solver.beta = num(),
        "eta1" => cfg.solver.eta1 = num(),
        "eta2" => cfg.solver.eta2 = num(),
        "tau" => cfg.solver.tau = num(),
        "lambda" => cfg.problem.lambda = num(),
        _ => unreachable!("grid keys are validated on parse"),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRecord {
    pub index: usize,
    pub name: String,
    pub params: Map<String, Value>,
    /// `completed`, `diverged`, `stalled` or `failed`.
    pub status: String,
    pub exit_code: i32,
    pub final_relative_gap: Option<f64>,
    pub gap_increases: usize,
    /// The gap rose in at least one round.
    pub non_monotone: bool,
    pub trace: Option<String>,
    pub summary: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepIndex {
    pub name: String,
    pub grid: Vec<Axis>,
    pub points: Vec<PointRecord>,
}

fn run_point(template: &ExperimentConfig, index: usize, point: &[(String, String)], dir: &Path) -> PointRecord {
    let mut cfg = template.clone();
    cfg.name = format!("{}-{index:03}", template.name);
    let mut params = Map::new();
    for (k, v) in point {
        apply(&mut cfg, k, v);
        let value = v
            .parse::<f64>()
            .ok()
            .and_then(serde_json::Number::from_f64)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(v.clone()));
        params.insert(k.clone(), value);
    }
    let (trace, summary) = run_paths(dir, &cfg.name, cfg.output.format);
    let file_name = |p: &Path| p.file_name().map(|s| s.to_string_lossy().into_owned());
    let mut rec = PointRecord {
        index,
        name: cfg.name.clone(),
        params,
        status: "failed".into(),
        exit_code: 0,
        final_relative_gap: None,
        gap_increases: 0,
        non_monotone: false,
        trace: None,
        summary: None,
        error: None,
    };
    let result = cfg.validate().and_then(|_| solve(&cfg, dir, false));
    match result {
        Ok(s) => {
            rec.status = s.status.clone();
            rec.final_relative_gap = s.last.and_then(|o| o.relative_gap);
            rec.gap_increases = s.gap_increases;
            rec.non_monotone = s.gap_increases > 0;
            rec.error = s.error;
            rec.trace = file_name(&trace);
            rec.summary = file_name(&summary);
        }
        Err(e) => {
            rec.exit_code = e.exit_code();
            rec.error = Some(e.to_string());
            if matches!(e, CliError::Stall(_)) {
                rec.status = "stalled".into();
                rec.trace = file_name(&trace);
                rec.summary = file_name(&summary);
            }
        }
    }
    rec
}

/// Runs every grid point, `jobs` at a time. Failures are recorded in the
/// index and do not stop the sweep.
pub fn sweep(template: &ExperimentConfig, axes: &[Axis], dir: &Path, jobs: usize) -> Result<SweepIndex, CliError> {
    if axes.is_empty() {
        return Err(CliError::Config("sweep needs at least one --grid axis".into()));
    }
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let pts = points(axes);
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(pts.len()));
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, pts.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(point) = pts.get(i) else { break };
                let rec = run_point(template, i, point, dir);
                results.lock().expect("no panics while holding the lock").push(rec);
            });
        }
    });
    let mut points = results.into_inner().expect("workers finished");
    points.sort_by_key(|r| r.index);
    let index = SweepIndex {
        name: template.name.clone(),
        grid: axes.to_vec(),
        points,
    };
    let path = dir.join(format!("{}.index.json", template.name));
    let text = serde_json::to_string_pretty(&index).expect("index serializes");
    fs::write(&path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(index)
}
