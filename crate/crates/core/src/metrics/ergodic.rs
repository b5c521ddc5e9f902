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

use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::metrics::objective::{lagrangian_with, neg_conj_mean};
use crate::metrics::{p_seminorm_sq, PMatrix};
use crate::problems::{ExtReal, ProblemInstance};
use crate::scalar::{dot, Scalar};

/// Slack added to every comparison to absorb round-off.
pub const ERGODIC_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErgodicPoint {
    pub t: usize,
    /// `L(w̄_T; v*) − L(w*; v̄_T)`
    pub lhs: f64,
    /// `‖z* − z_0‖²_P / (2T)`
    pub rhs: f64,
    /// Inexactness allowance `D·Σ_{t≤T}‖ε_t‖ / T` (zero for exact runs).
    pub inexact: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgodicReport {
    pub points: Vec<ErgodicPoint>,
    /// `‖z* − z_0‖²_P`
    pub initial_distance_sq: f64,
    /// `sup_t ‖z* − z_t‖`, the constant of the inexact bound.
    pub d_const: f64,
    pub all_hold: bool,
}

/// Compares the ergodic Lagrangian gap of the running averages
/// `z̄_T = (1/T) Σ_{t=1..T} z_t` with its bound for every `T`.
///
/// `iterates[0]` is the starting point. With `inner_errors` (one per round)
/// the bound is widened by `D·Σ‖ε_t‖/T` where `D` is the largest observed
/// Euclidean distance to the saddle point.
pub fn ergodic_gap_bound_check<T: Scalar>(
    problem: &ProblemInstance<T>,
    pm: &PMatrix<T>,
    iterates: &[(Vec<T>, Vec<T>)],
    (w_star, v_star): (&[T], &[T]),
    inner_errors: Option<&[f64]>,
) -> Result<ErgodicReport> {
    let (d, n) = (problem.d(), problem.n());
    check_len("saddle w", d, w_star.len())?;
    check_len("saddle v", n, v_star.len())?;
    if iterates.is_empty() {
        return Err(Error::InvalidData("ergodic check needs the initial iterate".into()));
    }
    let rounds = iterates.len() - 1;
    if let Some(e) = inner_errors {
        check_len("inner errors", rounds, e.len())?;
    }
    for (w, v) in iterates {
        check_len("iterate w", d, w.len())?;
        check_len("iterate v", n, v.len())?;
    }

    let diff = |a: &[T], b: &[T]| -> Vec<T> { a.iter().zip(b).map(|(&x, &y)| x - y).collect() };
    let (w0, v0) = &iterates[0];
    let dist0 = p_seminorm_sq(pm, problem, &diff(w_star, w0), &diff(v_star, v0))?.as_f64();

    let d_const = if inner_errors.is_some() {
        iterates
            .iter()
            .map(|(w, v)| {
                let dw = diff(w_star, w);
                let dv = diff(v_star, v);
                (dot(&dw, &dw) + dot(&dv, &dv)).sqrt().as_f64()
            })
            .fold(0.0, f64::max)
    } else {
        0.0
    };

    let xv_star = problem.x().mul_vec(v_star)?;
    let xtw_star = problem.x().tmul_vec(w_star)?;
    let nn = T::count(n);
    let mut w_sum = vec![T::zero(); d];
    let mut v_sum = vec![T::zero(); n];
    let mut err_sum = 0.0;
    let mut points = Vec::with_capacity(rounds);
    for t in 1..=rounds {
        let (w, v) = &iterates[t];
        for (s, &x) in w_sum.iter_mut().zip(w) {
            *s = *s + x;
        }
        for (s, &x) in v_sum.iter_mut().zip(v) {
            *s = *s + x;
        }
        if let Some(e) = inner_errors {
            err_sum += e[t - 1];
        }
        let tt = T::count(t);
        let w_bar: Vec<T> = w_sum.iter().map(|&s| s / tt).collect();
        let v_bar: Vec<T> = v_sum.iter().map(|&s| s / tt).collect();
        let upper = lagrangian_with(problem, &w_bar, v_star, &xv_star);
        // L(w*; v̄) with ⟨w*, X v̄⟩ = ⟨Xᵀw*, v̄⟩
        let lower = neg_conj_mean(problem, &v_bar)
            + ExtReal::Finite(dot(&xtw_star, &v_bar) / nn + problem.reg().eval(w_star));
        let lhs = (upper - lower).to_float().as_f64();
        let tf = t as f64;
        let rhs = dist0 / (2.0 * tf);
        let inexact = d_const * err_sum / tf;
        points.push(ErgodicPoint {
            t,
            lhs,
            rhs,
            inexact,
            holds: lhs <= rhs + inexact + ERGODIC_SLACK,
        });
    }
    let all_hold = points.iter().all(|p| p.holds);
    Ok(ErgodicReport {
        points,
        initial_distance_sq: dist0,
        d_const,
        all_hold,
    })
}
