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

//! Upper bounds on `λ_max(X_[k]ᵀX_[k])` by power iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BlockPartition, BlockView, FeatureMatrix};
use crate::scalar::{dot, norm, Scalar};

pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-6;
pub const DEFAULT_SPECTRAL_MAX_ITER: usize = 10_000;

/// Result of a spectral bound computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBound<T> {
    /// Upper bound on the largest eigenvalue of the local Gram matrix.
    pub value: T,
    pub iterations: usize,
    /// `true` when power iteration did not settle and the Frobenius norm
    /// was returned instead.
    pub fallback: bool,
}

/// Upper bound on `λ_max(X_[k]ᵀX_[k])`.
///
/// Power iteration runs on the Gram matrix applied as two matvecs from the
/// normalized all-ones vector. Iteration stops once the geometric tail of
/// Rayleigh-quotient increments is below `tol / 2` relative, and the estimate
/// is inflated by `1 + tol`. When that does not happen within `max_iter`
/// steps the squared Frobenius norm, which always dominates `λ_max`, is
/// returned with `fallback = true`.
pub fn spectral_bound<T: Scalar>(
    block: &BlockView<'_, T>,
    tol: T,
    max_iter: usize,
) -> Result<SpectralBound<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Config {
            field: "tol",
            reason: "spectral tolerance must be positive".into(),
        });
    }
    let frob = block.frobenius_sq();
    if frob == T::zero() {
        return Ok(SpectralBound {
            value: T::zero(),
            iterations: 0,
            fallback: false,
        });
    }
    let m = block.len();
    let mut x = vec![T::one() / T::count(m).sqrt(); m];
    let mut mu = T::zero();
    let mut prev_step: Option<T> = None;
    let half_tol = tol * T::lit(0.5);

    for it in 1..=max_iter {
        let y = block.gram_mul(&x)?;
        let mu_new = dot(&x, &y);
        let ny = norm(&y);
        if ny == T::zero() {
            // start vector in the null space; fall through to the Frobenius bound
            break;
        }
        // ‖Gx − μx‖ ≈ 0 means x is already an eigenvector
        let resid: T = y
            .iter()
            .zip(&x)
            .map(|(&yi, &xi)| (yi - mu_new * xi) * (yi - mu_new * xi))
            .sum();
        let step = (mu_new - mu).abs();
        mu = mu_new;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = *yi / ny;
        }
        if resid.sqrt() <= T::epsilon() * T::count(4 * m) * mu_new {
            return Ok(finish(mu, tol, it, frob));
        }
        if let Some(prev) = prev_step {
            if prev > T::zero() {
                let ratio = step / prev;
                if ratio < T::lit(0.999) {
                    let tail = step * ratio / (T::one() - ratio);
                    if step + tail <= half_tol * mu {
                        return Ok(finish(mu, tol, it, frob));
                    }
                }
            } else if step == T::zero() {
                return Ok(finish(mu, tol, it, frob));
            }
        }
        prev_step = Some(step);
    }
    Ok(SpectralBound {
        value: frob,
        iterations: max_iter,
        fallback: true,
    })
}

fn finish<T: Scalar>(mu: T, tol: T, iterations: usize, frob: T) -> SpectralBound<T> {
    SpectralBound {
        value: (mu * (T::one() + tol)).min(frob),
        iterations,
        fallback: false,
    }
}

/// `τ* = max_k λ_max(X_[k]ᵀX_[k])`, each term bounded from above.
pub fn tau_star<T: Scalar>(
    x: &FeatureMatrix<T>,
    partition: &BlockPartition,
    tol: T,
    max_iter: usize,
) -> Result<SpectralBound<T>> {
    let mut best = SpectralBound {
        value: T::zero(),
        iterations: 0,
        fallback: false,
    };
    for k in 0..partition.num_blocks() {
        let b = spectral_bound(&BlockView::new(x, partition, k), tol, max_iter)?;
        best.value = best.value.max(b.value);
        best.iterations = best.iterations.max(b.iterations);
        best.fallback |= b.fallback;
    }
    Ok(best)
}
