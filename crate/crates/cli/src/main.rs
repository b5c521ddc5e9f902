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

//! `distpd` command-line runner.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or input
//! error, 3 solver stall.

mod commands;
mod config;
mod output;
mod sweep;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
#[cfg(test)]
use clap::CommandFactory;
use distpd::data::{Regime, SyntheticConfig, Target};

use commands::{Check, LabelKind, VerifyArgs};
use config::ExperimentConfig;
use sweep::Axis;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("solver stalled: {0}")]
    Stall(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Stall(_) => 3,
        }
    }
}

impl From<distpd::Error> for CliError {
    fn from(e: distpd::Error) -> Self {
        match e {
            distpd::Error::Stall { .. } | distpd::Error::WorkerFailure { .. } => {
                CliError::Stall(e.to_string())
            }
            distpd::Error::Io(msg) => CliError::Io(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "distpd", version, about = "Distributed primal-dual solvers for regularized ERM")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment and write its trace and summary.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the number of rounds.
        #[arg(long)]
        rounds: Option<usize>,
        /// Output directory (default: config `output.dir`, then $DISTPD_OUT, then `.`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Record wall-clock time per round in the `elapsed` column.
        #[arg(long)]
        timing: bool,
    },
    /// Run an equivalence, positivity or convergence check.
    Verify {
        #[arg(value_enum)]
        check: Check,
        /// Problem to check; defaults to the built-in small ridge instance.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        rounds: Option<usize>,
        /// Proximal step for cor2a/cor2b (default 1/lambda).
        #[arg(long)]
        rho: Option<f64>,
        /// Random instances for lemma1 or draws for moreau.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Run a grid of configurations derived from one template.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Axis as key=v1,v2,... with key one of rule, rho, beta, eta1, eta2, tau, lambda.
        #[arg(long = "grid", required = true)]
        grid: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid points run concurrently.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Export a synthetic dataset in LibSVM format.
    GenData {
        /// Take the synthetic `[data]` section of this config.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        workers: Option<usize>,
        /// iid or non-iid
        #[arg(long, value_parser = parse_regime)]
        regime: Option<Regime>,
        /// dense or sparse
        #[arg(long, value_parser = parse_target)]
        target: Option<Target>,
        #[arg(long)]
        noise_std: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum)]
        labels: Option<LabelKind>,
        /// Destination file, `-` for stdout.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print statistics of a LibSVM file as JSON.
    Info {
        path: PathBuf,
        /// Feature dimension override.
        #[arg(long)]
        dim: Option<usize>,
        /// Also report tau* for a contiguous split over this many workers.
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn parse_regime(s: &str) -> Result<Regime, String> {
    match s {
        "iid" => Ok(Regime::Iid),
        "non-iid" | "noniid" => Ok(Regime::NonIid),
        _ => Err(format!("unknown regime '{s}' (iid, non-iid)")),
    }
}

fn parse_target(s: &str) -> Result<Target, String> {
    match s {
        "dense" => Ok(Target::Dense),
        "sparse" => Ok(Target::Sparse),
        _ => Err(format!("unknown target '{s}' (dense, sparse)")),
    }
}

fn load(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve {
            config,
            seed,
            rounds,
            out,
            timing,
        } => {
            let mut cfg = load(&config, seed)?;
            if let Some(r) = rounds {
                cfg.solver.rounds = r;
            }
            let dir = output::output_dir(out.as_deref(), Some(&cfg));
            let summary = commands::solve(&cfg, &dir, timing)?;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            let gap = summary.last.map(|o| o.gap).unwrap_or(f64::NAN);
            println!(
                "{}: {} after {} rounds, gap {gap:e}; trace in {}",
                summary.name,
                summary.status,
                summary.rounds_completed,
                dir.join(&summary.trace).display()
            );
            Ok(0)
        }
        Command::Verify {
            check,
            config,
            seed,
            rounds,
            rho,
            count,
            json,
        } => {
            let cfg = config.as_deref().map(|p| load(p, seed)).transpose()?;
            let args = VerifyArgs {
                check,
                seed: seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(42),
                config: cfg,
                rounds,
                rho,
                count,
            };
            let report = commands::verify(&args)?;
            commands::print_report(&report, json);
            Ok(verdict_code(&report))
        }
        Command::Sweep {
            config,
            grid,
            seed,
            out,
            jobs,
        } => {
            let cfg = load(&config, seed)?;
            let axes = grid
                .iter()
                .map(|g| g.parse::<Axis>())
                .collect::<Result<Vec<_>, _>>()?;
            let dir = output::output_dir(out.as_deref(), Some(&cfg));
            let index = sweep::sweep(&cfg, &axes, &dir, jobs)?;
            for p in &index.points {
                let gap = p
                    .final_relative_gap
                    .map(|g| format!("{g:e}"))
                    .unwrap_or_else(|| "-".into());
                let note = p.error.as_deref().unwrap_or("");
                println!("{} {} relative_gap={gap} {note}", p.name, p.status);
            }
            Ok(0)
        }
        Command::GenData {
            config,
            n,
            d,
            workers,
            regime,
            target,
            noise_std,
            seed,
            labels,
            out,
        } => {
            let (mut syn, default_labels) = match &config {
                Some(p) => {
                    let cfg = load(p, seed)?;
                    let labels = match cfg.problem.loss {
                        distpd::problems::LossKind::Hinge => LabelKind::Sign,
                        distpd::problems::LossKind::Squared => LabelKind::Regression,
                    };
                    (cfg.synthetic()?, labels)
                }
                None => (SyntheticConfig::default(), LabelKind::Regression),
            };
            syn.n = n.unwrap_or(syn.n);
            syn.d = d.unwrap_or(syn.d);
            syn.workers = workers.unwrap_or(syn.workers);
            syn.regime = regime.unwrap_or(syn.regime);
            syn.target = target.unwrap_or(syn.target);
            syn.noise_std = noise_std.unwrap_or(syn.noise_std);
            syn.seed = seed.unwrap_or(syn.seed);
            let notes = commands::gen_data(&syn, labels.unwrap_or(default_labels), &out)?;
            if out != Path::new("-") {
                println!("wrote {notes} to {}", out.display());
            }
            Ok(0)
        }
        Command::Info { path, dim, workers } => {
            let info = commands::info(&path, dim, workers)?;
            println!("{}", serde_json::to_string_pretty(&info).expect("info serializes"));
            Ok(0)
        }
    }
}

fn verdict_code(report: &distpd::verify::CheckReport) -> i32 {
    if report.passed {
        0
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
