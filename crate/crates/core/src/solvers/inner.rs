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

//! Solvers for the Gram-weighted dual block subproblem
//!
//! ```text
//! min_v  (1/n) Σ_{i∈P_k} ℓ_i*(v_i) + (c/2)‖X_[k](v − a)‖² − ⟨b, v⟩
//! ```
//!
//! Squared losses are solved by one positive definite linear system whose
//! factorization is cached per block. Hinge losses use cyclic coordinate
//! descent with exact clipped scalar steps.

use crate::error::{check_len, Result};
use crate::linalg::{BlockView, Cholesky};
use crate::problems::{ConjugateDomain, LossKind, LossSpec, ProblemInstance};
use crate::scalar::{axpy, dot, norm, norm_sq, Scalar};

/// Data of one block subproblem.
#[derive(Debug, Clone, Copy)]
pub struct GramSubproblem<'a, T> {
    /// Gram weight `c > 0`.
    pub c: T,
    /// Anchor `a`, also the warm start.
    pub anchor: &'a [T],
    /// Linear term `b`.
    pub linear: &'a [T],
}

#[derive(Debug, Clone, PartialEq)]
pub struct InnerOutcome<T> {
    pub v: Vec<T>,
    /// Norm of the minimum-norm subgradient at `v`.
    pub residual: T,
    /// Coordinate sweeps (zero for a direct solve).
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
enum Factor<T> {
    /// `(1/n)I + c·X_kᵀX_k`, used when `n_k ≤ d`.
    Samples(Cholesky<T>),
    /// `(1/(nc))I + X_kX_kᵀ`, used when `n_k > d`.
    Features(Cholesky<T>),
}

/// Per-worker solver state: local labels, column norms and, for squared
/// losses, the factorization for a fixed Gram weight.
#[derive(Debug, Clone)]
pub struct LocalSolver<T> {
    k: usize,
    c: T,
    n: usize,
    loss: LossSpec<T>,
    col_norms_sq: Vec<T>,
    factor: Option<Factor<T>>,
}

impl<T: Scalar> LocalSolver<T> {
    pub fn new(problem: &ProblemInstance<T>, k: usize, c: T) -> Result<Self> {
        let block = problem.block(k);
        let loss = problem.loss().select(block.indices());
        let col_norms_sq = (0..block.len()).map(|j| norm_sq(block.col(j))).collect();
        let n = problem.n();
        let factor = match loss.kind() {
            LossKind::Squared => Some(factorize(&block, n, c)?),
            LossKind::Hinge => None,
        };
        Ok(Self {
            k,
            c,
            n,
            loss,
            col_norms_sq,
            factor,
        })
    }

    pub fn worker(&self) -> usize {
        self.k
    }

    pub fn weight(&self) -> T {
        self.c
    }

    /// Solves the subproblem with Gram weight `self.weight()`.
    pub fn solve(
        &self,
        block: &BlockView<'_, T>,
        anchor: &[T],
        linear: &[T],
        tol: T,
        max_sweeps: usize,
    ) -> Result<InnerOutcome<T>> {
        check_len("subproblem anchor", block.len(), anchor.len())?;
        check_len("subproblem linear term", block.len(), linear.len())?;
        let sub = GramSubproblem {
            c: self.c,
            anchor,
            linear,
        };
        match &self.factor {
            Some(f) => self.solve_direct(block, f, &sub),
            None => Ok(self.coordinate_descent(block, &sub, tol, max_sweeps)),
        }
    }

    fn solve_direct(
        &self,
        block: &BlockView<'_, T>,
        factor: &Factor<T>,
        sub: &GramSubproblem<'_, T>,
    ) -> Result<InnerOutcome<T>> {
        let n = T::count(self.n);
        // M (v − a) = b − (y + a)/n  with  M = (1/n)I + c·G
        let rhs: Vec<T> = sub
            .linear
            .iter()
            .zip(sub.anchor)
            .zip(self.loss.labels())
            .map(|((&b, &a), &y)| b - (y + a) / n)
            .collect();
        let delta = match factor {
            Factor::Samples(ch) => ch.solve(&rhs),
            Factor::Features(ch) => {
                // M⁻¹r = n(r − X_kᵀ S⁻¹ X_k r)
                let xr = block.mul_vec(&rhs)?;
                let s = ch.solve(&xr);
                let back = block.tmul_vec(&s)?;
                rhs.iter().zip(back).map(|(&r, q)| n * (r - q)).collect()
            }
        };
        let v: Vec<T> = sub.anchor.iter().zip(delta).map(|(&a, d)| a + d).collect();
        let residual = subproblem_residual(block, &self.loss, self.n, sub, &v)?;
        Ok(InnerOutcome {
            v,
            residual,
            iterations: 0,
            converged: true,
        })
    }

    fn coordinate_descent(
        &self,
        block: &BlockView<'_, T>,
        sub: &GramSubproblem<'_, T>,
        tol: T,
        max_sweeps: usize,
    ) -> InnerOutcome<T> {
        let m = block.len();
        let n = T::count(self.n);
        let c = sub.c;
        let domains: Vec<ConjugateDomain<T>> = (0..m).map(|j| self.loss.domain(j)).collect();
        let mut v: Vec<T> = sub
            .anchor
            .iter()
            .zip(&domains)
            .map(|(&a, dom)| dom.clamp(a))
            .collect();
        let labels = self.loss.labels();

        let mut r = residual_vector(block, &v, sub.anchor);
        let mut res = projected_gradient_norm(block, &self.loss, n, sub, &v, &r);
        let mut sweeps = 0;
        while res > tol && sweeps < max_sweeps {
            sweeps += 1;
            for j in 0..m {
                let col = block.col(j);
                let g = labels[j] / n + c * dot(col, &r) - sub.linear[j];
                let h = c * self.col_norms_sq[j];
                let dom = domains[j];
                let new = if h > T::zero() {
                    dom.clamp(v[j] - g / h)
                } else if g > T::zero() {
                    dom.lo.unwrap_or(v[j])
                } else if g < T::zero() {
                    dom.hi.unwrap_or(v[j])
                } else {
                    nearest_bound(dom, v[j])
                };
                let step = new - v[j];
                if step != T::zero() {
                    axpy(step, col, &mut r);
                    v[j] = new;
                }
            }
            // refresh to keep incremental drift out of the reported residual
            r = residual_vector(block, &v, sub.anchor);
            res = projected_gradient_norm(block, &self.loss, n, sub, &v, &r);
        }
        InnerOutcome {
            v,
            residual: res,
            iterations: sweeps,
            converged: res <= tol,
        }
    }
}

fn factorize<T: Scalar>(block: &BlockView<'_, T>, n: usize, c: T) -> Result<Factor<T>> {
    let nn = T::count(n);
    let m = block.len();
    let d = block.dim();
    if m <= d {
        let mut g = block.dense_gram();
        for (idx, x) in g.iter_mut().enumerate() {
            *x = c * *x;
            if idx / m == idx % m {
                *x = *x + T::one() / nn;
            }
        }
        Ok(Factor::Samples(Cholesky::factor(m, &g)?))
    } else {
        let mut s = block.dense_outer_gram();
        let shift = T::one() / (nn * c);
        for i in 0..d {
            s[i * d + i] = s[i * d + i] + shift;
        }
        Ok(Factor::Features(Cholesky::factor(d, &s)?))
    }
}

fn nearest_bound<T: Scalar>(dom: ConjugateDomain<T>, x: T) -> T {
    match (dom.lo, dom.hi) {
        (Some(lo), Some(hi)) => {
            if (x - lo).abs() <= (hi - x).abs() {
                lo
            } else {
                hi
            }
        }
        (Some(lo), None) => lo,
        (None, Some(hi)) => hi,
        (None, None) => x,
    }
}

/// `X_k (v − a)`
fn residual_vector<T: Scalar>(block: &BlockView<'_, T>, v: &[T], a: &[T]) -> Vec<T> {
    let mut r = vec![T::zero(); block.dim()];
    for j in 0..block.len() {
        let diff = v[j] - a[j];
        if diff != T::zero() {
            axpy(diff, block.col(j), &mut r);
        }
    }
    r
}

fn projected_gradient_norm<T: Scalar>(
    block: &BlockView<'_, T>,
    loss: &LossSpec<T>,
    n: T,
    sub: &GramSubproblem<'_, T>,
    v: &[T],
    r: &[T],
) -> T {
    let mut acc = T::zero();
    for j in 0..block.len() {
        // gradient of the smooth part plus (1/n)·q where q ∈ ∂ℓ*(v_j)
        let smooth = sub.c * dot(block.col(j), r) - sub.linear[j];
        let comp = loss.conj_subdiff_distance(j, v[j], -smooth * n) / n;
        acc = acc + comp * comp;
    }
    acc.sqrt()
}

/// Norm of the minimum-norm element of the subdifferential of the block
/// objective at `v`; infinite when `v` leaves the conjugate domain.
pub fn subproblem_residual<T: Scalar>(
    block: &BlockView<'_, T>,
    loss: &LossSpec<T>,
    n: usize,
    sub: &GramSubproblem<'_, T>,
    v: &[T],
) -> Result<T> {
    check_len("subproblem point", block.len(), v.len())?;
    check_len("subproblem anchor", block.len(), sub.anchor.len())?;
    check_len("block labels", block.len(), loss.len())?;
    let r = residual_vector(block, v, sub.anchor);
    Ok(projected_gradient_norm(block, loss, T::count(n), sub, v, &r))
}

/// One-off solve of block `k`'s subproblem without a cached factorization.
pub fn inner_solve<T: Scalar>(
    problem: &ProblemInstance<T>,
    k: usize,
    sub: &GramSubproblem<'_, T>,
    tol: T,
    max_sweeps: usize,
) -> Result<InnerOutcome<T>> {
    let local = LocalSolver::new(problem, k, sub.c)?;
    local.solve(&problem.block(k), sub.anchor, sub.linear, tol, max_sweeps)
}

/// Euclidean norm of per-block residuals, the round error `‖ε‖`.
pub fn combine_residuals<T: Scalar>(residuals: &[T]) -> T {
    norm(residuals)
}
