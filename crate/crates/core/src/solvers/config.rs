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

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{tau_star, SpectralBound, DEFAULT_SPECTRAL_MAX_ITER, DEFAULT_SPECTRAL_TOL};
use crate::problems::{LossKind, ProblemInstance, RegKind};
use crate::scalar::Scalar;

/// The five update rules sharing one broadcast/aggregate round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Consensus,
    LinConsensus,
    Proximal1,
    Proximal2,
    Cocoa,
}

impl RuleKind {
    pub const ALL: [RuleKind; 5] = [
        RuleKind::Consensus,
        RuleKind::LinConsensus,
        RuleKind::Proximal1,
        RuleKind::Proximal2,
        RuleKind::Cocoa,
    ];

    /// Rules with a proximal-point matrix (everything except CoCoA).
    pub const ADMM: [RuleKind; 4] = [
        RuleKind::Consensus,
        RuleKind::LinConsensus,
        RuleKind::Proximal1,
        RuleKind::Proximal2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Consensus => "consensus",
            RuleKind::LinConsensus => "linconsensus",
            RuleKind::Proximal1 => "proximal1",
            RuleKind::Proximal2 => "proximal2",
            RuleKind::Cocoa => "cocoa",
        }
    }

    /// Whether the dual step solves a Gram-weighted subproblem (as opposed
    /// to a closed-form linearized prox).
    pub fn gram_weighted(self) -> bool {
        matches!(
            self,
            RuleKind::Consensus | RuleKind::Proximal1 | RuleKind::Cocoa
        )
    }

    pub fn uses_beta(self) -> bool {
        matches!(self, RuleKind::Consensus | RuleKind::LinConsensus)
    }

    pub fn uses_rho(self) -> bool {
        matches!(self, RuleKind::Proximal1 | RuleKind::Proximal2)
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        let key = key.strip_suffix("pd").unwrap_or(&key);
        match key {
            "consensus" => Ok(RuleKind::Consensus),
            "linconsensus" => Ok(RuleKind::LinConsensus),
            "proximal1" | "prox1" => Ok(RuleKind::Proximal1),
            "proximal2" | "prox2" => Ok(RuleKind::Proximal2),
            "cocoa" => Ok(RuleKind::Cocoa),
            _ => Err(Error::Config {
                field: "rule",
                reason: format!("unknown update rule '{s}'"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InnerMode {
    /// Direct linear solve; squared loss only.
    Exact,
    /// Iterate until the residual is below `c / t^p` in round `t`.
    Scheduled,
}

/// Accuracy policy for the Gram-weighted dual subproblems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerSchedule {
    pub mode: InnerMode,
    /// Base tolerance `c`.
    pub c: f64,
    /// Decay exponent `p`; must exceed 1 so the tolerances are summable.
    pub p: f64,
    /// Sweep budget per subproblem before the solve is declared stalled.
    pub max_sweeps: usize,
}

impl Default for InnerSchedule {
    fn default() -> Self {
        Self {
            mode: InnerMode::Scheduled,
            c: 1e-2,
            p: 2.0,
            max_sweeps: 100_000,
        }
    }
}

impl InnerSchedule {
    pub fn exact() -> Self {
        Self {
            mode: InnerMode::Exact,
            ..Self::default()
        }
    }

    pub fn scheduled(c: f64, p: f64) -> Self {
        Self {
            mode: InnerMode::Scheduled,
            c,
            p,
            ..Self::default()
        }
    }

    /// Round tolerance `c / t^p` for the 1-based round `t`.
    pub fn tolerance(&self, t: usize) -> f64 {
        self.c / (t.max(1) as f64).powf(self.p)
    }

    pub fn validate(&self, loss: LossKind) -> Result<()> {
        match self.mode {
            InnerMode::Exact if loss != LossKind::Squared => Err(Error::Config {
                field: "inner.mode",
                reason: "exact inner solves are only available for the squared loss".into(),
            }),
            InnerMode::Exact => Ok(()),
            InnerMode::Scheduled => {
                if !(self.c > 0.0 && self.c.is_finite()) {
                    return Err(Error::Config {
                        field: "inner.c",
                        reason: format!("base tolerance must be positive, got {}", self.c),
                    });
                }
                if !(self.p > 1.0 && self.p.is_finite()) {
                    return Err(Error::Config {
                        field: "inner.p",
                        reason: format!(
                            "decay exponent must exceed 1 for summable tolerances, got {}",
                            self.p
                        ),
                    });
                }
                if self.max_sweeps == 0 {
                    return Err(Error::Config {
                        field: "inner.max_sweeps",
                        reason: "sweep budget must be at least 1".into(),
                    });
                }
                Ok(())
            }
        }
    }
}

/// User-facing solver settings. Unset step parameters are filled in by
/// [`SolverConfig::resolve`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig<T> {
    pub rule: RuleKind,
    pub beta: Option<T>,
    pub rho: Option<T>,
    pub eta1: Option<T>,
    pub eta2: Option<T>,
    pub tau: Option<T>,
    pub rounds: usize,
    pub inner: InnerSchedule,
    pub seed: u64,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(rule: RuleKind) -> Self {
        Self {
            rule,
            beta: None,
            rho: None,
            eta1: None,
            eta2: None,
            tau: None,
            rounds: 100,
            inner: InnerSchedule::default(),
            seed: 0,
        }
    }

    pub fn with_beta(mut self, beta: T) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_rho(mut self, rho: T) -> Self {
        self.rho = Some(rho);
        self
    }

    pub fn with_eta1(mut self, eta1: T) -> Self {
        self.eta1 = Some(eta1);
        self
    }

    pub fn with_eta2(mut self, eta2: T) -> Self {
        self.eta2 = Some(eta2);
        self
    }

    pub fn with_tau(mut self, tau: T) -> Self {
        self.tau = Some(tau);
        self
    }

    pub fn with_rounds(mut self, rounds: usize) -> Self {
        self.rounds = rounds;
        self
    }

    pub fn with_inner(mut self, inner: InnerSchedule) -> Self {
        self.inner = inner;
        self
    }

    /// Checks compatibility with `problem` and fills defaults:
    /// `η1 = K`, `τ = τ*`, `η2 = K·τ*`, `ρ = 1/λ`, `β = λ/K`.
    pub fn resolve(&self, problem: &ProblemInstance<T>) -> Result<StepParams<T>> {
        if self.rule == RuleKind::Cocoa && problem.reg_kind() != RegKind::Ridge {
            return Err(Error::Config {
                field: "rule",
                reason: "cocoa requires the ridge regularizer".into(),
            });
        }
        self.inner.validate(problem.loss_kind())?;
        let k = T::count(problem.num_workers());
        let lambda = problem.lambda();
        let positive = |field: &'static str, v: Option<T>| -> Result<Option<T>> {
            match v {
                Some(x) if !(x > T::zero() && x.is_finite()) => Err(Error::Config {
                    field,
                    reason: format!("must be positive and finite, got {x}"),
                }),
                other => Ok(other),
            }
        };
        let beta = positive("beta", self.beta)?.unwrap_or(lambda / k);
        let rho = positive("rho", self.rho)?.unwrap_or(T::one() / lambda);
        let eta1 = positive("eta1", self.eta1)?.unwrap_or(k);
        let eta2 = positive("eta2", self.eta2)?;
        let tau = positive("tau", self.tau)?;

        let needs_tau = matches!(self.rule, RuleKind::LinConsensus | RuleKind::Proximal2);
        let tau_star_bound = if needs_tau {
            Some(tau_star(
                problem.x(),
                problem.partition(),
                T::lit(DEFAULT_SPECTRAL_TOL),
                DEFAULT_SPECTRAL_MAX_ITER,
            )?)
        } else {
            None
        };
        let ts = tau_star_bound.map(|b| b.value);
        let mut warnings = Vec::new();
        if tau_star_bound.is_some_and(|b| b.fallback) {
            warnings.push("power iteration did not settle; tau* uses the Frobenius bound".into());
        }
        let tau = match (tau, ts) {
            (Some(t), _) => t,
            (None, Some(s)) if s > T::zero() => s,
            // zero data: any positive value is admissible
            _ => T::one(),
        };
        let eta2 = eta2.unwrap_or_else(|| {
            let s = ts.unwrap_or(T::one());
            if s > T::zero() {
                k * s
            } else {
                k
            }
        });
        if let Some(s) = ts {
            if self.rule == RuleKind::LinConsensus && tau < s * (T::one() - T::lit(DEFAULT_SPECTRAL_TOL)) {
                warnings.push(format!("tau = {tau} is below tau* = {s}"));
            }
            if self.rule == RuleKind::Proximal2 && eta2 < k * s * (T::one() - T::lit(DEFAULT_SPECTRAL_TOL)) {
                warnings.push(format!("eta2 = {eta2} is below K*tau* = {}", k * s));
            }
        }
        if self.rule == RuleKind::Proximal1 && eta1 < k {
            warnings.push(format!("eta1 = {eta1} is below K = {k}"));
        }
        Ok(StepParams {
            rule: self.rule,
            workers: problem.num_workers(),
            n: problem.n(),
            lambda,
            beta,
            rho,
            eta1,
            eta2,
            tau,
            tau_star: tau_star_bound,
            warnings,
        })
    }
}

/// Fully resolved step parameters of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepParams<T> {
    pub rule: RuleKind,
    pub workers: usize,
    pub n: usize,
    pub lambda: T,
    pub beta: T,
    pub rho: T,
    pub eta1: T,
    pub eta2: T,
    pub tau: T,
    pub tau_star: Option<SpectralBound<T>>,
    pub warnings: Vec<String>,
}

/// How a worker updates its dual block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DualStep<T> {
    /// `min (1/n)Σℓ* + (c/2)‖v − v_old‖²_{X_kᵀX_k} − (1/n)⟨X_kᵀq, v⟩`
    Weighted { c: T },
    /// `v = prox_{s·ℓ*}(v_old + s·X_kᵀq)`
    Linearized { s: T },
}

impl<T: Scalar> StepParams<T> {
    pub fn dual_step(&self) -> DualStep<T> {
        let n = T::count(self.n);
        let k = T::count(self.workers);
        match self.rule {
            RuleKind::Consensus => DualStep::Weighted {
                c: T::one() / (n * n * self.beta),
            },
            RuleKind::LinConsensus => DualStep::Linearized {
                s: n * self.beta / self.tau,
            },
            RuleKind::Proximal1 => DualStep::Weighted {
                c: self.rho * self.eta1 / (n * n),
            },
            RuleKind::Proximal2 => DualStep::Linearized {
                s: n / (self.rho * self.eta2),
            },
            RuleKind::Cocoa => DualStep::Weighted {
                c: k / (n * n * self.lambda),
            },
        }
    }
}
