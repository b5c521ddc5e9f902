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
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    /// `½(u − y)²`
    Squared,
    /// `max(0, 1 − y·u)` with `y ∈ {−1, +1}`
    Hinge,
}

/// Feasible interval of the conjugate variable `v_i`. `None` means the side
/// is unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugateDomain<T> {
    pub lo: Option<T>,
    pub hi: Option<T>,
}

impl<T: Scalar> ConjugateDomain<T> {
    pub fn contains(&self, v: T) -> bool {
        self.lo.is_none_or(|lo| v >= lo) && self.hi.is_none_or(|hi| v <= hi)
    }

    pub fn clamp(&self, v: T) -> T {
        let v = self.lo.map_or(v, |lo| v.max(lo));
        self.hi.map_or(v, |hi| v.min(hi))
    }

    pub fn at_lower(&self, v: T) -> bool {
        self.lo.is_some_and(|lo| v <= lo)
    }

    pub fn at_upper(&self, v: T) -> bool {
        self.hi.is_some_and(|hi| v >= hi)
    }
}

/// Per-sample losses `ℓ_i`; the labels live here rather than in the data
/// matrix so one matrix can back both regression and classification.
#[derive(Debug, Clone, PartialEq)]
pub struct LossSpec<T> {
    kind: LossKind,
    labels: Vec<T>,
}

impl<T: Scalar> LossSpec<T> {
    pub fn new(kind: LossKind, labels: Vec<T>) -> Result<Self> {
        if let Some(i) = labels.iter().position(|y| !y.is_finite()) {
            return Err(Error::InvalidData(format!("label {i} is not finite")));
        }
        if kind == LossKind::Hinge {
            if let Some(i) = labels
                .iter()
                .position(|&y| y != T::one() && y != -T::one())
            {
                return Err(Error::InvalidData(format!(
                    "hinge label {i} must be -1 or +1, got {}",
                    labels[i]
                )));
            }
        }
        Ok(Self { kind, labels })
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn labels(&self) -> &[T] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// `ℓ_i(u)`
    pub fn eval(&self, i: usize, u: T) -> T {
        let y = self.labels[i];
        match self.kind {
            LossKind::Squared => T::lit(0.5) * (u - y) * (u - y),
            LossKind::Hinge => (T::one() - y * u).max(T::zero()),
        }
    }

    pub fn domain(&self, i: usize) -> ConjugateDomain<T> {
        match self.kind {
            LossKind::Squared => ConjugateDomain { lo: None, hi: None },
            LossKind::Hinge => {
                // y·v ∈ [−1, 0]
                if self.labels[i] > T::zero() {
                    ConjugateDomain {
                        lo: Some(-T::one()),
                        hi: Some(T::zero()),
                    }
                } else {
                    ConjugateDomain {
                        lo: Some(T::zero()),
                        hi: Some(T::one()),
                    }
                }
            }
        }
    }

    /// `ℓ_i*(v)`
    pub fn conj(&self, i: usize, v: T) -> ExtReal<T> {
        let y = self.labels[i];
        match self.kind {
            LossKind::Squared => ExtReal::Finite(T::lit(0.5) * v * v + y * v),
            LossKind::Hinge => {
                let yv = y * v;
                if yv >= -T::one() && yv <= T::zero() {
                    ExtReal::Finite(yv)
                } else {
                    ExtReal::PosInf
                }
            }
        }
    }

    /// `prox_{s·ℓ_i*}(x)`; the result always lies in the conjugate domain.
    pub fn prox_conj(&self, i: usize, s: T, x: T) -> T {
        let y = self.labels[i];
        match self.kind {
            LossKind::Squared => (x - s * y) / (T::one() + s),
            LossKind::Hinge => y * (y * x - s).max(-T::one()).min(T::zero()),
        }
    }

    /// `prox_{s·ℓ_i}(x)`
    pub fn prox(&self, i: usize, s: T, x: T) -> T {
        let y = self.labels[i];
        match self.kind {
            LossKind::Squared => (x + s * y) / (T::one() + s),
            LossKind::Hinge => {
                let z = y * x;
                if z > T::one() {
                    x
                } else if z < T::one() - s {
                    x + s * y
                } else {
                    y
                }
            }
        }
    }

    /// Distance from `q` to the subdifferential `∂ℓ_i*(v)`; infinite when `v`
    /// is outside the conjugate domain.
    pub fn conj_subdiff_distance(&self, i: usize, v: T, q: T) -> T {
        let y = self.labels[i];
        match self.kind {
            LossKind::Squared => (q - (v + y)).abs(),
            LossKind::Hinge => {
                let dom = self.domain(i);
                if !dom.contains(v) {
                    return T::infinity();
                }
                let diff = q - y;
                // normal cone is (−∞, 0] at the lower end and [0, ∞) at the upper
                if dom.at_lower(v) {
                    diff.max(T::zero())
                } else if dom.at_upper(v) {
                    (-diff).max(T::zero())
                } else {
                    diff.abs()
                }
            }
        }
    }

    /// Restricts the spec to the given samples, in order.
    pub fn select(&self, idx: &[usize]) -> Self {
        Self {
            kind: self.kind,
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(y: f64) -> LossSpec<f64> {
        LossSpec::new(LossKind::Squared, vec![y]).unwrap()
    }

    fn hinge(y: f64) -> LossSpec<f64> {
        LossSpec::new(LossKind::Hinge, vec![y]).unwrap()
    }

    #[test]
    fn loss_values() {
        assert_eq!(sq(1.0).eval(0, 1.0), 0.0);
        assert_eq!(hinge(1.0).eval(0, 2.0), 0.0);
        // max(0, 1 − (−1)(0.5)) = 1.5
        assert_eq!(hinge(-1.0).eval(0, 0.5), 1.5);
    }

    #[test]
    fn conjugate_values() {
        assert_eq!(sq(0.0).conj(0, 2.0), ExtReal::Finite(2.0));
        assert_eq!(hinge(1.0).conj(0, -0.5), ExtReal::Finite(-0.5));
        assert_eq!(hinge(1.0).conj(0, 0.5), ExtReal::PosInf);
        assert_eq!(hinge(-1.0).conj(0, 0.5), ExtReal::Finite(-0.5));
    }

    #[test]
    fn conjugate_prox_values() {
        assert_eq!(sq(0.0).prox_conj(0, 1.0, 2.0), 1.0);
        assert_eq!(hinge(1.0).prox_conj(0, 0.1, -2.0), -1.0);
        let v = hinge(-1.0).prox_conj(0, 0.1, 0.5);
        assert!(hinge(-1.0).domain(0).contains(v));
    }

    #[test]
    fn rejects_bad_labels() {
        assert!(LossSpec::new(LossKind::Hinge, vec![1.0, 0.0]).is_err());
        assert!(LossSpec::new(LossKind::Squared, vec![f64::NAN]).is_err());
        assert!(LossSpec::new(LossKind::Squared, vec![0.3]).is_ok());
    }

    #[test]
    fn subdifferential_distance_at_boundaries() {
        let h = hinge(1.0);
        // v = −1 (lower end): ∂ℓ*(v) = (−∞, 1]
        assert_eq!(h.conj_subdiff_distance(0, -1.0, 0.5), 0.0);
        assert_eq!(h.conj_subdiff_distance(0, -1.0, 1.5), 0.5);
        // interior: {1}
        assert_eq!(h.conj_subdiff_distance(0, -0.5, 1.25), 0.25);
        // upper end v = 0: [1, ∞)
        assert_eq!(h.conj_subdiff_distance(0, 0.0, 3.0), 0.0);
        assert_eq!(h.conj_subdiff_distance(0, 0.0, 0.0), 1.0);
        assert!(h.conj_subdiff_distance(0, 0.5, 0.0).is_infinite());
    }
}
