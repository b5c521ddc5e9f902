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

//! The positive semidefinite matrices that put each ADMM-type rule in the
//! generic proximal-point form `P(z_t − z_{t+1}) ∈ F(z_{t+1})`, applied
//! through matrix-vector products only.

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::problems::ProblemInstance;
use crate::scalar::{dot, norm_sq, Scalar};
use crate::solvers::{RuleKind, StepParams};

/// Lower-right block of `P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DualWeight<T> {
    /// `c · blockdiag(X_[k]ᵀX_[k])`
    Gram(T),
    /// `c · I`
    Identity(T),
}

/// `P = [[a·I, s·X/n], [s·Xᵀ/n, D]]` with sign `s = ±1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PMatrix<T> {
    pub rule: RuleKind,
    pub primal_weight: T,
    pub cross_sign: T,
    pub dual: DualWeight<T>,
}

/// Quadratic forms more negative than this are reported as PSD violations.
pub const PSD_TOLERANCE: f64 = 1e-9;

impl<T: Scalar> PMatrix<T> {
    pub fn for_rule(params: &StepParams<T>) -> Result<Self> {
        let n = T::count(params.n);
        let n2 = n * n;
        let k = T::count(params.workers);
        let (primal_weight, cross_sign, dual) = match params.rule {
            RuleKind::Consensus => (
                params.beta * k,
                T::one(),
                DualWeight::Gram(T::one() / (n2 * params.beta)),
            ),
            RuleKind::LinConsensus => (
                params.beta * k,
                T::one(),
                DualWeight::Identity(params.tau / (n2 * params.beta)),
            ),
            RuleKind::Proximal1 => (
                T::one() / params.rho,
                -T::one(),
                DualWeight::Gram(params.rho * params.eta1 / n2),
            ),
            RuleKind::Proximal2 => (
                T::one() / params.rho,
                -T::one(),
                DualWeight::Identity(params.rho * params.eta2 / n2),
            ),
            RuleKind::Cocoa => {
                return Err(Error::Config {
                    field: "rule",
                    reason: "cocoa has no proximal-point matrix".into(),
                })
            }
        };
        Ok(Self {
            rule: params.rule,
            primal_weight,
            cross_sign,
            dual,
        })
    }

    /// `P (dw, dv)`
    pub fn apply(
        &self,
        problem: &ProblemInstance<T>,
        dw: &[T],
        dv: &[T],
    ) -> Result<(Vec<T>, Vec<T>)> {
        check_len("P primal input", problem.d(), dw.len())?;
        check_len("P dual input", problem.n(), dv.len())?;
        let n = T::count(problem.n());
        let s = self.cross_sign / n;
        let xdv = problem.x().mul_vec(dv)?;
        let xtdw = problem.x().tmul_vec(dw)?;
        let top = dw
            .iter()
            .zip(&xdv)
            .map(|(&a, &b)| self.primal_weight * a + s * b)
            .collect();
        let mut bottom: Vec<T> = xtdw.iter().map(|&b| s * b).collect();
        match self.dual {
            DualWeight::Identity(c) => {
                for (o, &x) in bottom.iter_mut().zip(dv) {
                    *o = *o + c * x;
                }
            }
            DualWeight::Gram(c) => {
                for k in 0..problem.num_workers() {
                    let b = problem.block(k);
                    let g = b.gram_mul(&b.gather(dv))?;
                    for (&i, gi) in b.indices().iter().zip(g) {
                        bottom[i] = bottom[i] + c * gi;
                    }
                }
            }
        }
        Ok((top, bottom))
    }

    /// `zᵀPz` without the sign check.
    pub fn quadratic_form(&self, problem: &ProblemInstance<T>, dw: &[T], dv: &[T]) -> Result<T> {
        check_len("P primal input", problem.d(), dw.len())?;
        check_len("P dual input", problem.n(), dv.len())?;
        let n = T::count(problem.n());
        let cross = T::lit(2.0) * self.cross_sign / n * dot(dw, &problem.x().mul_vec(dv)?);
        let dual = match self.dual {
            DualWeight::Identity(c) => c * norm_sq(dv),
            DualWeight::Gram(c) => {
                let mut acc = T::zero();
                for k in 0..problem.num_workers() {
                    let b = problem.block(k);
                    acc = acc + b.gram_seminorm_sq(&b.gather(dv))?;
                }
                c * acc
            }
        };
        Ok(self.primal_weight * norm_sq(dw) + cross + dual)
    }

    /// Densifies `P` (row-major, size `d + n`). Verification only.
    pub fn dense(&self, problem: &ProblemInstance<T>) -> Vec<f64> {
        let (d, n) = (problem.d(), problem.n());
        let m = d + n;
        let nn = n as f64;
        let s = self.cross_sign.as_f64() / nn;
        let mut p = vec![0.0; m * m];
        for i in 0..d {
            p[i * m + i] = self.primal_weight.as_f64();
        }
        let x = problem.x();
        for j in 0..n {
            for i in 0..d {
                let v = s * x.get(i, j).as_f64();
                p[i * m + d + j] = v;
                p[(d + j) * m + i] = v;
            }
        }
        match self.dual {
            DualWeight::Identity(c) => {
                for j in 0..n {
                    p[(d + j) * m + d + j] = c.as_f64();
                }
            }
            DualWeight::Gram(c) => {
                let owner = problem.partition().owners();
                for a in 0..n {
                    for b in 0..n {
                        if owner[a] == owner[b] {
                            let g: f64 = x
                                .col(a)
                                .iter()
                                .zip(x.col(b))
                                .map(|(p, q)| p.as_f64() * q.as_f64())
                                .sum();
                            p[(d + a) * m + d + b] = c.as_f64() * g;
                        }
                    }
                }
            }
        }
        p
    }
}

/// `‖z‖²_P`; a value below `−1e−9` means `P` is not PSD for the chosen
/// parameters and is reported as an error.
pub fn p_seminorm_sq<T: Scalar>(
    pm: &PMatrix<T>,
    problem: &ProblemInstance<T>,
    dw: &[T],
    dv: &[T],
) -> Result<T> {
    let q = pm.quadratic_form(problem, dw, dv)?;
    if q.as_f64() < -PSD_TOLERANCE {
        return Err(Error::NotPsd { value: q.as_f64() });
    }
    Ok(q.max(T::zero()))
}
