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

//! Trace files and run summaries.
//!
//! CSV columns, in order: `round, primal, dual, gap, relative_gap,
//! inner_residual, scalars, elapsed`. Floats carry 17 significant digits;
//! `elapsed` is empty unless timing was requested, so repeated runs produce
//! byte-identical files.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use distpd::data::DatasetMeta;
use distpd::metrics::GapReport;
use distpd::simnet::CommStats;
use distpd::solvers::{RunOutput, StepParams, TraceRecord};
use serde::Serialize;

use crate::config::{ExperimentConfig, TraceFormat};
use crate::CliError;

pub const CSV_HEADER: &str = "round,primal,dual,gap,relative_gap,inner_residual,scalars,elapsed";

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "DISTPD_OUT";

/// `--out`, then the config's `output.dir`, then `$DISTPD_OUT`, then `.`.
pub fn output_dir(flag: Option<&Path>, cfg: Option<&ExperimentConfig>) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.and_then(|c| c.output.dir.clone()))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_trace(path: &Path, records: &[TraceRecord], format: TraceFormat) -> Result<(), CliError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    match format {
        TraceFormat::Csv => {
            writeln!(out, "{CSV_HEADER}").map_err(io_err(path))?;
            for r in records {
                let elapsed = r.elapsed.map(float).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.round,
                    float(r.primal),
                    float(r.dual),
                    float(r.gap),
                    float(r.relative_gap),
                    float(r.inner_residual),
                    r.scalars,
                    elapsed
                )
                .map_err(io_err(path))?;
            }
        }
        TraceFormat::Jsonl => {
            for r in records {
                let line = serde_json::to_string(r).expect("trace records serialize");
                writeln!(out, "{line}").map_err(io_err(path))?;
            }
        }
    }
    out.flush().map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Objectives {
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub relative_gap: Option<f64>,
}

impl From<&GapReport<f64>> for Objectives {
    fn from(g: &GapReport<f64>) -> Self {
        Self {
            primal: g.primal,
            dual: g.dual,
            gap: g.gap,
            relative_gap: None,
        }
    }
}

impl From<&TraceRecord> for Objectives {
    fn from(r: &TraceRecord) -> Self {
        Self {
            primal: r.primal,
            dual: r.dual,
            gap: r.gap,
            relative_gap: Some(r.relative_gap),
        }
    }
}

/// Everything needed to rerun a trace: the effective configuration
/// (overrides applied) plus what the run resolved and produced.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub name: String,
    pub version: &'static str,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub dataset: DatasetMeta,
    pub parameters: Option<StepParams<f64>>,
    /// `completed`, `diverged` or `stalled`.
    pub status: String,
    pub error: Option<String>,
    pub rounds_completed: usize,
    pub initial: Option<Objectives>,
    #[serde(rename = "final")]
    pub last: Option<Objectives>,
    /// Relative gaps are absolute gaps because the initial gap was zero or
    /// not finite.
    pub relative_is_absolute: bool,
    /// Rounds whose gap rose above the previous round's.
    pub gap_increases: usize,
    pub cumulative_inner_residual: f64,
    pub communication: Option<CommStats>,
    pub warnings: Vec<String>,
    pub trace: String,
}

impl Summary {
    pub fn new(cfg: &ExperimentConfig, meta: DatasetMeta, trace: &Path) -> Self {
        Self {
            name: cfg.name.clone(),
            version: env!("CARGO_PKG_VERSION"),
            seed: cfg.seed,
            config: cfg.clone(),
            dataset: meta,
            parameters: None,
            status: "completed".into(),
            error: None,
            rounds_completed: 0,
            initial: None,
            last: None,
            relative_is_absolute: false,
            gap_increases: 0,
            cumulative_inner_residual: 0.0,
            communication: None,
            warnings: Vec::new(),
            trace: trace
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        }
    }

    pub fn record_output(&mut self, out: &RunOutput<f64>) {
        let tr = &out.trace;
        self.rounds_completed = tr.records.len();
        self.initial = Some((&tr.initial).into());
        self.last = tr.final_record().map(Objectives::from);
        self.relative_is_absolute = tr.relative_is_absolute;
        self.gap_increases = tr.gap_increases;
        self.cumulative_inner_residual = tr
            .final_record()
            .map(|r| r.cumulative_inner_residual)
            .unwrap_or(0.0);
        self.communication = Some(out.comm.clone());
        if let distpd::solvers::RunStatus::Diverged { round } = out.status {
            self.status = "diverged".into();
            self.error = Some(format!("iterates stopped being finite in round {round}"));
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("summary serializes");
        fs::write(path, text + "\n").map_err(io_err(path))
    }
}
