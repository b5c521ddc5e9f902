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

use crate::error::{check_len, Result};
use crate::problems::ProblemInstance;
use crate::scalar::{all_finite, Scalar};

/// Primal/dual iterate pair together with the previous pair needed for the
/// extrapolated terms, and the cached aggregate `X v`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState<T> {
    pub w: Vec<T>,
    pub w_prev: Vec<T>,
    pub v: Vec<T>,
    pub v_prev: Vec<T>,
    /// `Σ_k X_[k] v_[k]`, summed in worker order.
    pub xv: Vec<T>,
    /// Number of completed rounds.
    pub t: usize,
}

impl<T: Scalar> IterateState<T> {
    /// `z = (0, 0)` with the previous iterates equal to the current ones.
    pub fn zeros(d: usize, n: usize) -> Self {
        Self {
            w: vec![T::zero(); d],
            w_prev: vec![T::zero(); d],
            v: vec![T::zero(); n],
            v_prev: vec![T::zero(); n],
            xv: vec![T::zero(); d],
            t: 0,
        }
    }

    /// Starts from an arbitrary point; the aggregate is formed block by
    /// block in worker order, exactly as a round would.
    pub fn from_point(problem: &ProblemInstance<T>, w: Vec<T>, v: Vec<T>) -> Result<Self> {
        check_len("initial w", problem.d(), w.len())?;
        check_len("initial v", problem.n(), v.len())?;
        let xv = aggregate(problem, &v)?;
        Ok(Self {
            w_prev: w.clone(),
            w,
            v_prev: v.clone(),
            v,
            xv,
            t: 0,
        })
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.w) && all_finite(&self.v) && all_finite(&self.xv)
    }
}

/// `X v` accumulated over blocks in ascending worker order.
pub fn aggregate<T: Scalar>(problem: &ProblemInstance<T>, v: &[T]) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); problem.d()];
    for k in 0..problem.num_workers() {
        let b = problem.block(k);
        let part = b.mul_vec(&b.gather(v))?;
        for (o, p) in out.iter_mut().zip(part) {
            *o = *o + p;
        }
    }
    Ok(out)
}
