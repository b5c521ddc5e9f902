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

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use distpd::data::{parse_libsvm, write_libsvm, ParseOptions, SyntheticConfig};
use distpd::linalg::{tau_star, BlockPartition, DENSE_CHECK_LIMIT, DEFAULT_SPECTRAL_MAX_ITER, DEFAULT_SPECTRAL_TOL};
use distpd::solvers::{run, RunOptions};
use distpd::verify::{
    check_cor1, check_cor2a, check_cor2b, check_ergodic, check_lemma1, check_moreau, check_ppm,
    default_instance, CheckReport,
};
use distpd::Error;
use serde::Serialize;

use crate::config::{ExperimentConfig, TraceFormat};
use crate::output::{write_trace, Summary};
use crate::CliError;

/// Trace and summary paths for a run named `name`.
pub fn run_paths(dir: &Path, name: &str, format: TraceFormat) -> (PathBuf, PathBuf) {
    let ext = match format {
        TraceFormat::Csv => "csv",
        TraceFormat::Jsonl => "jsonl",
    };
    (
        dir.join(format!("{name}.{ext}")),
        dir.join(format!("{name}.summary.json")),
    )
}

/// Runs one experiment and writes its trace and summary. A stalled run still
/// writes the partial trace and a summary before reporting the stall.
pub fn solve(cfg: &ExperimentConfig, dir: &Path, timing: bool) -> Result<Summary, CliError> {
    let built = cfg.build()?;
    let solver_cfg = cfg.solver_config()?;
    let params = solver_cfg.resolve(&built.problem)?;
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let (trace_path, summary_path) = run_paths(dir, &cfg.name, cfg.output.format);

    let mut summary = Summary::new(cfg, built.meta, &trace_path);
    summary.warnings = built.warnings;
    summary.warnings.extend(params.warnings.iter().cloned());
    summary.parameters = Some(params);

    let opts = RunOptions {
        timing,
        ..RunOptions::default()
    };
    match run(&built.problem, &solver_cfg, &opts) {
        Ok(out) => {
            write_trace(&trace_path, &out.trace.records, cfg.output.format)?;
            summary.record_output(&out);
            summary.write(&summary_path)?;
            Ok(summary)
        }
        Err(failure) => {
            let records = failure
                .partial
                .as_ref()
                .map(|p| p.trace.records.as_slice())
                .unwrap_or(&[]);
            write_trace(&trace_path, records, cfg.output.format)?;
            if let Some(p) = &failure.partial {
                summary.record_output(p);
            }
            summary.status = "stalled".into();
            summary.error = Some(failure.error.to_string());
            summary.write(&summary_path)?;
            Err(failure.error.into())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Cor1,
    Cor2a,
    Cor2b,
    Lemma1,
    Ppm,
    Ergodic,
    Moreau,
}

pub struct VerifyArgs {
    pub check: Check,
    pub config: Option<ExperimentConfig>,
    pub seed: u64,
    pub rounds: Option<usize>,
    pub rho: Option<f64>,
    pub count: Option<usize>,
}

/// Runs one check and returns its report.
pub fn verify(args: &VerifyArgs) -> Result<CheckReport, CliError> {
    let instance = || -> Result<distpd::Problem, CliError> {
        let p = match &args.config {
            Some(cfg) => cfg.build()?.problem,
            None => default_instance(args.seed)?,
        };
        if p.n() > DENSE_CHECK_LIMIT {
            return Err(Error::TooLarge {
                n: p.n(),
                limit: DENSE_CHECK_LIMIT,
            }
            .into());
        }
        Ok(p)
    };
    let rounds = |default: usize| args.rounds.unwrap_or(default);
    let report = match args.check {
        Check::Cor1 => check_cor1(&instance()?, rounds(50))?,
        Check::Cor2a | Check::Cor2b => {
            let p = instance()?;
            let rho = args.rho.unwrap_or(1.0 / p.lambda());
            if args.check == Check::Cor2a {
                check_cor2a(&p, rho, rounds(50))?
            } else {
                check_cor2b(&p, rho, rounds(50))?
            }
        }
        Check::Lemma1 => check_lemma1(args.count.unwrap_or(100), args.seed)?,
        Check::Ppm => check_ppm(&instance()?, rounds(50))?,
        Check::Ergodic => check_ergodic(&instance()?, rounds(200))?,
        Check::Moreau => check_moreau(args.count.unwrap_or(1000), args.seed)?,
    };
    Ok(report)
}

pub fn print_report(r: &CheckReport, json: bool) {
    if json {
        println!("{}", serde_json::to_string_pretty(r).expect("report serializes"));
        return;
    }
    let status = if r.passed { "PASS" } else { "FAIL" };
    println!(
        "{}: {status} max_deviation={:e} tolerance={:e}",
        r.name, r.max_deviation, r.tolerance
    );
    for (k, v) in &r.details {
        println!("  {k} = {v:e}");
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LabelKind {
    /// Real-valued responses.
    Regression,
    /// Signs of the responses, for classification.
    Sign,
}

/// Writes a synthetic dataset in LibSVM format to `out` (`-` for stdout).
pub fn gen_data(cfg: &SyntheticConfig, labels: LabelKind, out: &Path) -> Result<String, CliError> {
    let ds = cfg.generate::<f64>()?;
    let y = match labels {
        LabelKind::Regression => ds.labels.clone(),
        LabelKind::Sign => ds.sign_labels(),
    };
    if out == Path::new("-") {
        let stdout = io::stdout();
        write_libsvm(BufWriter::new(stdout.lock()), &ds.x, &y)?;
    } else {
        let file = File::create(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
        let mut w = BufWriter::new(file);
        write_libsvm(&mut w, &ds.x, &y)?;
        w.flush().map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    }
    let mut notes = format!("{} samples, {} features", ds.meta.n, ds.meta.d);
    for w in &ds.warnings {
        notes.push_str(&format!("; warning: {w}"));
    }
    Ok(notes)
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    pub path: String,
    pub n: usize,
    pub d: usize,
    pub max_index: usize,
    pub nonzeros: usize,
    pub density: f64,
    pub binary_labels: bool,
    pub positives: usize,
    pub negatives: usize,
    pub label_min: f64,
    pub label_max: f64,
    pub max_sample_norm_sq: f64,
    /// Largest per-block Gram eigenvalue bound under a contiguous split.
    pub tau_star: Option<f64>,
    pub workers: Option<usize>,
}

pub fn info(path: &Path, dim: Option<usize>, workers: Option<usize>) -> Result<DatasetInfo, CliError> {
    let file = File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let data = parse_libsvm(
        BufReader::new(file),
        ParseOptions {
            dim,
            normalize_labels: true,
        },
    )?;
    let (d, n) = (data.x.rows(), data.x.cols());
    let nonzeros = data.x.as_col_major().iter().filter(|v| **v != 0.0).count();
    let max_sample_norm_sq = (0..n)
        .map(|i| data.x.col(i).iter().map(|v| v * v).sum::<f64>())
        .fold(0.0, f64::max);
    let tau = match workers {
        Some(k) => {
            let p = BlockPartition::contiguous(n, k)?;
            Some(tau_star(&data.x, &p, DEFAULT_SPECTRAL_TOL, DEFAULT_SPECTRAL_MAX_ITER)?.value)
        }
        None => None,
    };
    let y = &data.labels;
    Ok(DatasetInfo {
        path: path.display().to_string(),
        n,
        d,
        max_index: data.max_index,
        nonzeros,
        density: nonzeros as f64 / (n * d) as f64,
        binary_labels: data.binary,
        positives: y.iter().filter(|v| **v > 0.0).count(),
        negatives: y.iter().filter(|v| **v < 0.0).count(),
        label_min: y.iter().copied().fold(f64::INFINITY, f64::min),
        label_max: y.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        max_sample_norm_sq,
        tau_star: tau,
        workers,
    })
}
