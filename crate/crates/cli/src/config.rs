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

//! Experiment configuration: one TOML file with `[data]`, `[problem]`,
//! `[solver]` and `[output]` sections.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use distpd::data::{
    parse_libsvm, partition, DatasetMeta, ParseOptions, PartitionMode, Regime, SyntheticConfig,
    Target,
};
use distpd::problems::{LossKind, LossSpec, ProblemInstance, RegKind, RegularizerSpec};
use distpd::solvers::{InnerMode, InnerSchedule, RuleKind, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_name")]
    pub name: String,
    /// Seeds data generation, shuffled partitions and the solver.
    #[serde(default)]
    pub seed: u64,
    pub data: DataConfig,
    #[serde(default)]
    pub problem: ProblemConfig,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_name() -> String {
    "run".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Synthetic,
    Libsvm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub source: Source,
    pub workers: usize,
    /// LibSVM file, relative paths resolved against the config file.
    pub path: Option<PathBuf>,
    /// Feature dimension override for LibSVM input.
    pub dim: Option<usize>,
    #[serde(default)]
    pub partition: PartitionMode,
    pub n: Option<usize>,
    pub d: Option<usize>,
    #[serde(default)]
    pub regime: Regime,
    #[serde(default)]
    pub target: Target,
    #[serde(default = "one")]
    pub noise_std: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default = "default_loss")]
    pub loss: LossKind,
    #[serde(default = "default_reg")]
    pub regularizer: RegKind,
    /// Defaults to `1/n`.
    pub lambda: Option<f64>,
}

fn default_loss() -> LossKind {
    LossKind::Squared
}

fn default_reg() -> RegKind {
    RegKind::Ridge
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self {
            loss: default_loss(),
            regularizer: default_reg(),
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_rule")]
    pub rule: String,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    pub beta: Option<f64>,
    pub rho: Option<f64>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub tau: Option<f64>,
    #[serde(default)]
    pub inner: InnerSection,
}

fn default_rule() -> String {
    "proximal1".into()
}

fn default_rounds() -> usize {
    100
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            rule: default_rule(),
            rounds: default_rounds(),
            beta: None,
            rho: None,
            eta1: None,
            eta2: None,
            tau: None,
            inner: InnerSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerSection {
    #[serde(default = "default_mode")]
    pub mode: InnerMode,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_sweeps")]
    pub max_sweeps: usize,
}

fn default_mode() -> InnerMode {
    InnerMode::Scheduled
}

fn default_c() -> f64 {
    InnerSchedule::default().c
}

fn default_p() -> f64 {
    InnerSchedule::default().p
}

fn default_sweeps() -> usize {
    InnerSchedule::default().max_sweeps
}

impl Default for InnerSection {
    fn default() -> Self {
        Self {
            mode: default_mode(),
            c: default_c(),
            p: default_p(),
            max_sweeps: default_sweeps(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceFormat {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default)]
    pub format: TraceFormat,
}

fn config_error(field: &str, reason: impl Into<String>) -> CliError {
    CliError::Config(format!("{field}: {}", reason.into()))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: Self = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(p) = &cfg.data.path {
            if p.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.data.path = Some(base.join(p));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let rule = self.rule()?;
        if rule == RuleKind::Cocoa && self.problem.regularizer != RegKind::Ridge {
            return Err(config_error(
                "solver.rule",
                "cocoa requires the ridge regularizer",
            ));
        }
        match self.data.source {
            Source::Synthetic => {
                if self.data.n.is_none() || self.data.d.is_none() {
                    return Err(config_error("data.n", "synthetic data needs n and d"));
                }
                if self.data.path.is_some() {
                    return Err(config_error("data.path", "only used with source = \"libsvm\""));
                }
            }
            Source::Libsvm => {
                if self.data.path.is_none() {
                    return Err(config_error("data.path", "libsvm source needs a file path"));
                }
            }
        }
        Ok(())
    }

    pub fn rule(&self) -> Result<RuleKind, CliError> {
        self.solver
            .rule
            .parse()
            .map_err(|_| config_error("solver.rule", format!("unknown rule '{}'", self.solver.rule)))
    }

    pub fn solver_config(&self) -> Result<SolverConfig<f64>, CliError> {
        let s = &self.solver;
        let inner = InnerSchedule {
            mode: s.inner.mode,
            c: s.inner.c,
            p: s.inner.p,
            max_sweeps: s.inner.max_sweeps,
        };
        Ok(SolverConfig {
            rule: self.rule()?,
            beta: s.beta,
            rho: s.rho,
            eta1: s.eta1,
            eta2: s.eta2,
            tau: s.tau,
            rounds: s.rounds,
            inner,
            seed: self.seed,
        })
    }

    pub fn synthetic(&self) -> Result<SyntheticConfig, CliError> {
        let d = &self.data;
        if d.source != Source::Synthetic {
            return Err(config_error("data.source", "expected synthetic data"));
        }
        Ok(SyntheticConfig {
            n: d.n.unwrap_or(0),
            d: d.d.unwrap_or(0),
            workers: d.workers,
            regime: d.regime,
            target: d.target,
            noise_std: d.noise_std,
            seed: self.seed,
        })
    }

    /// Loads or generates the data and assembles the problem.
    pub fn build(&self) -> Result<Built, CliError> {
        let loss = self.problem.loss;
        match self.data.source {
            Source::Synthetic => {
                let ds = self.synthetic()?.generate::<f64>()?;
                let reg = self.regularizer(ds.meta.n)?;
                let problem = ds.instance(loss, reg)?;
                Ok(Built {
                    problem,
                    meta: ds.meta,
                    warnings: ds.warnings,
                })
            }
            Source::Libsvm => {
                let path = self.data.path.as_ref().expect("validated");
                let file = File::open(path)
                    .map_err(|e| config_error("data.path", format!("{}: {e}", path.display())))?;
                let opts = ParseOptions {
                    dim: self.data.dim,
                    normalize_labels: loss == LossKind::Hinge,
                };
                let data = parse_libsvm(BufReader::new(file), opts)?;
                if loss == LossKind::Hinge && !data.binary {
                    return Err(config_error(
                        "problem.loss",
                        "hinge loss needs labels in {0, 1} or {-1, +1}",
                    ));
                }
                let n = data.x.cols();
                let part = partition(n, self.data.workers, self.seed, self.data.partition)?;
                let meta = DatasetMeta {
                    n,
                    d: data.x.rows(),
                    workers: self.data.workers,
                    source: path.display().to_string(),
                };
                let problem = ProblemInstance::new(
                    data.x,
                    LossSpec::new(loss, data.labels)?,
                    self.regularizer(n)?,
                    part,
                )?;
                Ok(Built {
                    problem,
                    meta,
                    warnings: Vec::new(),
                })
            }
        }
    }

    fn regularizer(&self, n: usize) -> Result<RegularizerSpec<f64>, CliError> {
        let lambda = self.problem.lambda.unwrap_or(1.0 / n as f64);
        Ok(RegularizerSpec::new(self.problem.regularizer, lambda)?)
    }
}

pub struct Built {
    pub problem: ProblemInstance<f64>,
    pub meta: DatasetMeta,
    pub warnings: Vec<String>,
}
