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

//! Saddle points of small instances, computed without any update rule.

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::problems::{LossKind, ProblemInstance, RegKind};
use crate::scalar::{dot, Scalar};

/// `(w*, v*)` with `w* = −Xv*/(nλ)` for ridge problems.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddlePoint<T> {
    pub w: Vec<T>,
    pub v: Vec<T>,
    /// Optimality residual reached by the oracle.
    pub residual: f64,
}

/// Saddle point of a ridge-regularized instance: a direct linear solve for
/// the squared loss, dual coordinate descent to `1e−13` for the hinge loss.
pub fn saddle_point<T: Scalar>(problem: &ProblemInstance<T>) -> Result<SaddlePoint<T>> {
    if problem.reg_kind() != RegKind::Ridge {
        return Err(Error::Config {
            field: "regularizer",
            reason: "saddle-point oracle needs the ridge regularizer".into(),
        });
    }
    match problem.loss_kind() {
        LossKind::Squared => ridge_squared(problem),
        LossKind::Hinge => ridge_hinge(problem, 1e-13, 1_000_000),
    }
}

/// Solves `(XXᵀ/n + λI) w = X y / n`, then `v_i = x_iᵀw − y_i`.
fn ridge_squared<T: Scalar>(problem: &ProblemInstance<T>) -> Result<SaddlePoint<T>> {
    let x = problem.x().cast::<f64>();
    let (d, n) = (x.rows(), x.cols());
    let nn = n as f64;
    let lambda = problem.lambda().as_f64();
    let y: Vec<f64> = problem.loss().labels().iter().map(|v| v.as_f64()).collect();
    let mut a = vec![0.0; d * d];
    let mut rhs = vec![0.0; d];
    for i in 0..n {
        let c = x.col(i);
        for p in 0..d {
            rhs[p] += c[p] * y[i] / nn;
            for q in 0..d {
                a[p * d + q] += c[p] * c[q] / nn;
            }
        }
    }
    for p in 0..d {
        a[p * d + p] += lambda;
    }
    let w = Cholesky::factor(d, &a)?.solve(&rhs);
    let v: Vec<f64> = (0..n).map(|i| dot(x.col(i), &w) - y[i]).collect();
    let xv = x.mul_vec(&v)?;
    let residual = w
        .iter()
        .zip(&xv)
        .map(|(&wi, &s)| (wi + s / (nn * lambda)).abs())
        .fold(0.0, f64::max);
    Ok(SaddlePoint {
        w: w.into_iter().map(T::lit).collect(),
        v: v.into_iter().map(T::lit).collect(),
        residual,
    })
}

/// Cyclic coordinate descent on
/// `min_v (1/n)Σ y_i v_i + ‖Xv‖²/(2λn²)` over `y_i v_i ∈ [−1, 0]`.
fn ridge_hinge<T: Scalar>(
    problem: &ProblemInstance<T>,
    tol: f64,
    max_sweeps: usize,
) -> Result<SaddlePoint<T>> {
    let x = problem.x().cast::<f64>();
    let (d, n) = (x.rows(), x.cols());
    let nn = n as f64;
    let lambda = problem.lambda().as_f64();
    let y: Vec<f64> = problem.loss().labels().iter().map(|v| v.as_f64()).collect();
    let c = 1.0 / (lambda * nn * nn);
    let norms: Vec<f64> = (0..n).map(|i| dot(x.col(i), x.col(i))).collect();
    let mut v = vec![0.0; n];
    let mut s = vec![0.0; d];
    let bounds = |i: usize| if y[i] > 0.0 { (-1.0, 0.0) } else { (0.0, 1.0) };
    let mut residual = f64::INFINITY;
    for _ in 0..max_sweeps {
        for i in 0..n {
            let (lo, hi) = bounds(i);
            let g = y[i] / nn + c * dot(x.col(i), &s);
            let h = c * norms[i];
            let new = if h > 0.0 {
                (v[i] - g / h).clamp(lo, hi)
            } else if g > 0.0 {
                lo
            } else {
                hi
            };
            let step = new - v[i];
            if step != 0.0 {
                for (sj, &xj) in s.iter_mut().zip(x.col(i)) {
                    *sj += step * xj;
                }
                v[i] = new;
            }
        }
        s = x.mul_vec(&v)?;
        residual = 0.0_f64;
        for i in 0..n {
            let (lo, hi) = bounds(i);
            let g = y[i] / nn + c * dot(x.col(i), &s);
            let r = if v[i] <= lo {
                (-g).max(0.0)
            } else if v[i] >= hi {
                g.max(0.0)
            } else {
                g.abs()
            };
            residual = residual.max(r);
        }
        if residual <= tol {
            break;
        }
    }
    if residual > tol {
        return Err(Error::Stall {
            round: 0,
            worker: 0,
            residual,
            iterations: max_sweeps,
        });
    }
    let w: Vec<f64> = s.iter().map(|&si| -si / (nn * lambda)).collect();
    Ok(SaddlePoint {
        w: w.into_iter().map(T::lit).collect(),
        v: v.into_iter().map(T::lit).collect(),
        residual,
    })
}
