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

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::scalar::Scalar;

/// Extended real value. Conjugates of hinge losses and of the ℓ1 norm are
/// indicators, so objectives may be `±∞`; the infinite cases are explicit
/// variants rather than floating sentinels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal<T> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T: Scalar> ExtReal<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(&self) -> Option<T> {
        match *self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Maps to a float, with the infinite variants becoming `±inf`.
    pub fn to_float(&self) -> T {
        match *self {
            ExtReal::NegInf => T::neg_infinity(),
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => T::infinity(),
        }
    }

    pub fn scale(self, c: T) -> Self {
        debug_assert!(c > T::zero());
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * c),
            other => other,
        }
    }
}

impl<T: Scalar> From<T> for ExtReal<T> {
    fn from(v: T) -> Self {
        ExtReal::Finite(v)
    }
}

impl<T: Scalar> Add for ExtReal<T> {
    type Output = Self;

    /// `+∞ + −∞` is not meaningful here; it resolves to `+∞` since the only
    /// sums formed are of conjugate terms that share a sign convention.
    fn add(self, rhs: Self) -> Self {
        use ExtReal::*;
        match (self, rhs) {
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }
}

impl<T: Scalar> Neg for ExtReal<T> {
    type Output = Self;
    fn neg(self) -> Self {
        use ExtReal::*;
        match self {
            PosInf => NegInf,
            NegInf => PosInf,
            Finite(a) => Finite(-a),
        }
    }
}

impl<T: Scalar> Sub for ExtReal<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Scalar> fmt::Display for ExtReal<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::PosInf => write!(f, "inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
        }
    }
}
