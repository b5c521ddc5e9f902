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
use crate::metrics::PMatrix;
use crate::problems::ProblemInstance;
use crate::scalar::Scalar;

/// Distance of `P(z_t − z_{t+1})` from `F(z_{t+1})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PpmResidual {
    pub max_abs: f64,
    pub l2: f64,
}

/// Checks the inclusion `P(z_t − z_{t+1}) ∈ F(z_{t+1})` with
/// `F(w, v) = (Xv/n + ∂g(w), (1/n)∂ℓ*(v) − Xᵀw/n)`. Set-valued parts are
/// handled by distance to the subdifferential interval.
pub fn ppm_residual<T: Scalar>(
    problem: &ProblemInstance<T>,
    pm: &PMatrix<T>,
    (w_t, v_t): (&[T], &[T]),
    (w_next, v_next): (&[T], &[T]),
) -> Result<PpmResidual> {
    let (d, n) = (problem.d(), problem.n());
    check_len("w_t", d, w_t.len())?;
    check_len("w_next", d, w_next.len())?;
    check_len("v_t", n, v_t.len())?;
    check_len("v_next", n, v_next.len())?;
    let dw: Vec<T> = w_t.iter().zip(w_next).map(|(&a, &b)| a - b).collect();
    let dv: Vec<T> = v_t.iter().zip(v_next).map(|(&a, &b)| a - b).collect();
    let (rw, rv) = pm.apply(problem, &dw, &dv)?;
    let nn = T::count(n);
    let xv = problem.x().mul_vec(v_next)?;
    let xtw = problem.x().tmul_vec(w_next)?;
    let reg = problem.reg();
    let loss = problem.loss();

    let mut max_abs = 0.0_f64;
    let mut sq = 0.0_f64;
    let mut push = |e: f64| {
        max_abs = max_abs.max(e);
        sq += e * e;
    };
    for j in 0..d {
        push(reg.subdiff_distance(w_next[j], rw[j] - xv[j] / nn).as_f64());
    }
    for i in 0..n {
        let q = nn * rv[i] + xtw[i];
        push((loss.conj_subdiff_distance(i, v_next[i], q) / nn).as_f64());
    }
    Ok(PpmResidual {
        max_abs,
        l2: sq.sqrt(),
    })
}
