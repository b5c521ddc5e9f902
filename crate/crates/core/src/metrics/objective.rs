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

use crate::error::{check_len, Result};
use crate::problems::{ExtReal, ProblemInstance, RegKind};
use crate::scalar::{dot, norm_inf, Scalar};
use crate::solvers::aggregate;

/// `(1/n) Σ_i ℓ_i(x_iᵀw) + g(w)`
pub fn primal_objective<T: Scalar>(problem: &ProblemInstance<T>, w: &[T]) -> Result<T> {
    let margins = problem.x().tmul_vec(w)?;
    let n = T::count(problem.n());
    let loss = problem.loss();
    let total = margins
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, &u)| acc + loss.eval(i, u));
    Ok(total / n + problem.reg().eval(w))
}

/// `−(1/n) Σ_i ℓ_i*(v_i) − g*(−Xv/n)`; `−∞` outside the dual domain.
pub fn dual_objective<T: Scalar>(problem: &ProblemInstance<T>, v: &[T]) -> Result<ExtReal<T>> {
    check_len("dual point", problem.n(), v.len())?;
    let xv = aggregate(problem, v)?;
    dual_objective_with(problem, v, &xv)
}

/// [`dual_objective`] with a precomputed `X v`.
pub fn dual_objective_with<T: Scalar>(
    problem: &ProblemInstance<T>,
    v: &[T],
    xv: &[T],
) -> Result<ExtReal<T>> {
    check_len("dual point", problem.n(), v.len())?;
    check_len("dual aggregate", problem.d(), xv.len())?;
    let n = T::count(problem.n());
    let u: Vec<T> = xv.iter().map(|&s| -s / n).collect();
    let conj_sum = conj_loss_sum(problem, v);
    Ok(-(conj_sum.scale(T::one() / n)) - problem.reg().conj(&u))
}

fn conj_loss_sum<T: Scalar>(problem: &ProblemInstance<T>, v: &[T]) -> ExtReal<T> {
    let loss = problem.loss();
    v.iter()
        .enumerate()
        .fold(ExtReal::Finite(T::zero()), |acc, (i, &vi)| {
            acc + loss.conj(i, vi)
        })
}

/// `L(w; v) = −(1/n) Σ ℓ_i*(v_i) + (1/n)⟨w, Xv⟩ + g(w)`
pub fn lagrangian<T: Scalar>(problem: &ProblemInstance<T>, w: &[T], v: &[T]) -> Result<ExtReal<T>> {
    check_len("primal point", problem.d(), w.len())?;
    check_len("dual point", problem.n(), v.len())?;
    let xv = aggregate(problem, v)?;
    Ok(lagrangian_with(problem, w, v, &xv))
}

pub(crate) fn lagrangian_with<T: Scalar>(
    problem: &ProblemInstance<T>,
    w: &[T],
    v: &[T],
    xv: &[T],
) -> ExtReal<T> {
    let n = T::count(problem.n());
    let rest = dot(w, xv) / n + problem.reg().eval(w);
    neg_conj_mean(problem, v) + ExtReal::Finite(rest)
}

/// `−(1/n) Σ ℓ_i*(v_i)`
pub(crate) fn neg_conj_mean<T: Scalar>(problem: &ProblemInstance<T>, v: &[T]) -> ExtReal<T> {
    -(conj_loss_sum(problem, v).scale(T::one() / T::count(problem.n())))
}

/// Primal value, dual value and their gap at one iterate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapReport<T> {
    pub primal: T,
    /// Dual value, after the ℓ1 feasibility rescaling when it applies.
    pub dual: T,
    /// `primal − dual`; `+∞` when the dual point is infeasible.
    pub gap: T,
    /// Factor the dual point was multiplied by before evaluating the dual
    /// (1 unless the ℓ1 box was violated).
    pub dual_scale: T,
}

impl<T: Scalar> GapReport<T> {
    pub fn to_f64(&self) -> GapReport<f64> {
        GapReport {
            primal: self.primal.as_f64(),
            dual: self.dual.as_f64(),
            gap: self.gap.as_f64(),
            dual_scale: self.dual_scale.as_f64(),
        }
    }
}

/// Factor `min(1, nλ/‖Xv‖_∞)` that pulls `−Xv/n` into the ℓ1 conjugate's
/// box; 1 for other regularizers.
pub fn dual_rescale_factor<T: Scalar>(problem: &ProblemInstance<T>, xv: &[T]) -> T {
    if problem.reg_kind() != RegKind::L1 {
        return T::one();
    }
    let bound = T::count(problem.n()) * problem.lambda();
    let m = norm_inf(xv);
    if m > bound {
        bound / m
    } else {
        T::one()
    }
}

/// Duality gap certificate at `(w, v)` given `X v`.
pub fn gap_report<T: Scalar>(
    problem: &ProblemInstance<T>,
    w: &[T],
    v: &[T],
    xv: &[T],
) -> Result<GapReport<T>> {
    let primal = primal_objective(problem, w)?;
    let theta = dual_rescale_factor(problem, xv);
    let dual = if theta == T::one() {
        dual_objective_with(problem, v, xv)?
    } else {
        let vs: Vec<T> = v.iter().map(|&x| x * theta).collect();
        let xs: Vec<T> = xv.iter().map(|&x| x * theta).collect();
        match dual_objective_with(problem, &vs, &xs)? {
            // round-off can leave the scaled point a hair outside the box
            ExtReal::NegInf if problem.reg_kind() == RegKind::L1 => {
                let n = T::count(problem.n());
                ExtReal::Finite(-(conj_loss_sum(problem, &vs).to_float()) / n)
            }
            other => other,
        }
    };
    let dual = dual.to_float();
    Ok(GapReport {
        primal,
        dual,
        gap: primal - dual,
        dual_scale: theta,
    })
}

/// Gaps divided by the initial gap. When the initial gap is zero or not
/// finite the absolute gaps are returned with `true` as the second value.
pub fn relative_gap(initial_gap: f64, gaps: &[f64]) -> (Vec<f64>, bool) {
    if initial_gap > 0.0 && initial_gap.is_finite() {
        (gaps.iter().map(|g| g / initial_gap).collect(), false)
    } else {
        (gaps.to_vec(), true)
    }
}
