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

//! Independent reference computations shared by the integration tests.
//! Nothing here calls into the solver paths it is used to check.

#![allow(dead_code)]

use distpd::data::{Regime, SyntheticConfig, Target};
use distpd::linalg::{BlockPartition, FeatureMatrix};
use distpd::problems::{LossKind, LossSpec, ProblemInstance, RegularizerSpec};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, d: usize, n: usize) -> FeatureMatrix<f64> {
    let data = (0..d * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    FeatureMatrix::from_col_major(d, n, data).unwrap()
}

pub fn to_dmatrix(x: &FeatureMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(x.rows(), x.cols(), x.as_col_major())
}

/// Small synthetic instance with the given loss; hinge uses sign labels.
pub fn small_instance(
    n: usize,
    d: usize,
    k: usize,
    loss: LossKind,
    lambda: f64,
    seed: u64,
) -> ProblemInstance<f64> {
    let ds = SyntheticConfig {
        n,
        d,
        workers: k,
        regime: Regime::Iid,
        target: Target::Dense,
        noise_std: 1.0,
        seed,
    }
    .generate::<f64>()
    .unwrap();
    ds.instance(loss, RegularizerSpec::ridge(lambda).unwrap())
        .unwrap()
}

pub fn instance_from(
    x: FeatureMatrix<f64>,
    loss: LossKind,
    labels: Vec<f64>,
    reg: RegularizerSpec<f64>,
    k: usize,
) -> ProblemInstance<f64> {
    let n = x.cols();
    ProblemInstance::new(
        x,
        LossSpec::new(loss, labels).unwrap(),
        reg,
        BlockPartition::contiguous(n, k).unwrap(),
    )
    .unwrap()
}

/// Ridge regression minimizer from the primal normal equations
/// `(XXᵀ/n + λI) w = Xy/n`, via nalgebra's LU.
pub fn ridge_primal(problem: &ProblemInstance<f64>) -> Vec<f64> {
    let x = to_dmatrix(problem.x());
    let n = problem.n() as f64;
    let y = DVector::from_column_slice(problem.loss().labels());
    let a = &x * x.transpose() / n + DMatrix::identity(problem.d(), problem.d()) * problem.lambda();
    let b = &x * y / n;
    a.lu().solve(&b).unwrap().iter().copied().collect()
}

/// Largest eigenvalue of `X_kᵀX_k` by a dense eigensolve.
pub fn dense_lambda_max(x: &FeatureMatrix<f64>, idx: &[usize]) -> f64 {
    let cols: Vec<f64> = idx.iter().flat_map(|&i| x.col(i).to_vec()).collect();
    let xk = DMatrix::from_column_slice(x.rows(), idx.len(), &cols);
    let g = xk.transpose() * xk;
    SymmetricEigen::new(g).eigenvalues.iter().copied().fold(f64::MIN, f64::max)
}

/// Minimizer of a convex scalar function on `[lo, hi]` by golden-section
/// search down to interval width `1e-13` relative.
pub fn argmin_scalar(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// `sup_{u ∈ [−50, 50]} u·v − f(u)` on a grid of step `1e−3`.
pub fn grid_conjugate(f: impl Fn(f64) -> f64, v: f64) -> f64 {
    let steps = 100_000;
    (0..=steps)
        .map(|j| -50.0 + j as f64 * 1e-3)
        .map(|u| u * v - f(u))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Minimizer of `s·f(p) + ½(p − x)²` over `[lo, hi]`, found by bisection on
/// the right derivative `s·f'₊(p) + p − x`, which is nondecreasing.
pub fn prox_by_bisection(right_deriv: impl Fn(f64) -> f64, s: f64, x: f64, lo: f64, hi: f64) -> f64 {
    let g = |p: f64| s * right_deriv(p) + p - x;
    if g(lo) >= 0.0 {
        return lo;
    }
    let (mut a, mut b) = (lo, hi);
    if g(b) < 0.0 {
        return b;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g(m) >= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}
