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

//! Residuals of the decomposition `x = prox_{s f}(x) + s·prox_{f*/s}(x/s)`
//! for every implemented `(f, f*)` pair, built only from the closed-form
//! prox maps.

use crate::problems::{LossSpec, RegularizerSpec};
use crate::scalar::Scalar;

/// Residual for the loss of sample `i`.
pub fn loss_moreau_residual<T: Scalar>(loss: &LossSpec<T>, i: usize, s: T, x: T) -> T {
    let p = loss.prox(i, s, x);
    let q = loss.prox_conj(i, T::one() / s, x / s);
    p + s * q - x
}

/// Largest coordinate residual for the regularizer.
pub fn reg_moreau_residual<T: Scalar>(reg: &RegularizerSpec<T>, s: T, x: &[T]) -> T {
    let p = reg.prox(s, x);
    let xs: Vec<T> = x.iter().map(|&v| v / s).collect();
    let q = reg.conj_prox(T::one() / s, &xs);
    x.iter()
        .zip(p.iter().zip(&q))
        .fold(T::zero(), |m, (&xi, (&pi, &qi))| m.max((pi + s * qi - xi).abs()))
}
