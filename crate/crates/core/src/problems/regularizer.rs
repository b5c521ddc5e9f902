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

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::ExtReal;
use crate::scalar::{norm_inf, norm_sq, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegKind {
    /// `(λ/2)‖w‖²`
    Ridge,
    /// `λ‖w‖₁`
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizerSpec<T> {
    kind: RegKind,
    lambda: T,
}

impl<T: Scalar> RegularizerSpec<T> {
    pub fn new(kind: RegKind, lambda: T) -> Result<Self> {
        if !(lambda > T::zero() && lambda.is_finite()) {
            return Err(Error::Config {
                field: "lambda",
                reason: format!("regularization strength must be positive and finite, got {lambda}"),
            });
        }
        Ok(Self { kind, lambda })
    }

    pub fn ridge(lambda: T) -> Result<Self> {
        Self::new(RegKind::Ridge, lambda)
    }

    pub fn l1(lambda: T) -> Result<Self> {
        Self::new(RegKind::L1, lambda)
    }

    pub fn kind(&self) -> RegKind {
        self.kind
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    /// `g(w)`
    pub fn eval(&self, w: &[T]) -> T {
        match self.kind {
            RegKind::Ridge => T::lit(0.5) * self.lambda * norm_sq(w),
            RegKind::L1 => self.lambda * w.iter().fold(T::zero(), |a, &x| a + x.abs()),
        }
    }

    /// `prox_{s·g}` applied to one coordinate (both penalties are separable).
    #[inline]
    pub fn prox_scalar(&self, s: T, x: T) -> T {
        match self.kind {
            RegKind::Ridge => x / (T::one() + s * self.lambda),
            RegKind::L1 => soft_threshold(x, s * self.lambda),
        }
    }

    /// `prox_{s·g}(x)`
    pub fn prox(&self, s: T, x: &[T]) -> Vec<T> {
        x.iter().map(|&xi| self.prox_scalar(s, xi)).collect()
    }

    /// `g*(u)`
    pub fn conj(&self, u: &[T]) -> ExtReal<T> {
        match self.kind {
            RegKind::Ridge => ExtReal::Finite(norm_sq(u) / (T::lit(2.0) * self.lambda)),
            RegKind::L1 => {
                if norm_inf(u) <= self.lambda {
                    ExtReal::Finite(T::zero())
                } else {
                    ExtReal::PosInf
                }
            }
        }
    }

    /// `prox_{s·g*}(x)`
    pub fn conj_prox(&self, s: T, x: &[T]) -> Vec<T> {
        match self.kind {
            RegKind::Ridge => {
                let c = self.lambda / (self.lambda + s);
                x.iter().map(|&xi| xi * c).collect()
            }
            RegKind::L1 => x
                .iter()
                .map(|&xi| xi.max(-self.lambda).min(self.lambda))
                .collect(),
        }
    }

    /// Distance from `q` to `∂g_j(w_j)` for one coordinate.
    pub fn subdiff_distance(&self, w: T, q: T) -> T {
        match self.kind {
            RegKind::Ridge => (q - self.lambda * w).abs(),
            RegKind::L1 => {
                if w == T::zero() {
                    (q.abs() - self.lambda).max(T::zero())
                } else {
                    (q - self.lambda * w.signum()).abs()
                }
            }
        }
    }
}

#[inline]
pub fn soft_threshold<T: Scalar>(x: T, t: T) -> T {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        T::zero()
    }
}
