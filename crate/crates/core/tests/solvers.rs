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

mod common;

use common::{instance_from, random_matrix, ridge_primal, rng, small_instance, to_dmatrix};
use distpd::problems::{LossKind, RegularizerSpec};
use distpd::solvers::{
    inner_solve, round_cocoa_pd, round_consensus_pd, round_linconsensus_pd, round_proximal1_pd,
    round_proximal2_pd, subproblem_residual, GramSubproblem, InnerSchedule, RuleKind, RunOptions,
    run, RunStatus, Solver,
};
use distpd::verify::saddle_point;
use distpd::{Config, Error, Problem, Problem32};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn configs(problem: &Problem) -> Vec<Config> {
    let k = problem.num_workers() as f64;
    let rho = 1.0 / problem.lambda();
    RuleKind::ALL
        .iter()
        .map(|&rule| {
            let c = Config::new(rule).with_inner(InnerSchedule::exact());
            if rule.uses_beta() {
                c.with_beta(1.0 / (rho * k))
            } else if rule.uses_rho() {
                c.with_rho(rho)
            } else {
                c
            }
        })
        .collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn ridge_oracle_matches_normal_equations() {
    for seed in [1, 2, 3] {
        let p = small_instance(60, 10, 3, LossKind::Squared, 1.0 / 60.0, seed);
        let star = saddle_point(&p).unwrap();
        let w = ridge_primal(&p);
        assert!(max_diff(&star.w, &w) <= 1e-10);
        // v_i = x_iᵀw − y_i for the squared loss
        for i in 0..p.n() {
            let r: f64 = p.x().col(i).iter().zip(&w).map(|(a, b)| a * b).sum::<f64>()
                - p.loss().labels()[i];
            assert!((star.v[i] - r).abs() <= 1e-10);
        }
    }
}

#[test]
fn saddle_point_is_a_fixed_point_of_every_rule() {
    let p = small_instance(60, 10, 3, LossKind::Squared, 1.0 / 60.0, 5);
    let star = saddle_point(&p).unwrap();
    for cfg in configs(&p) {
        let opts = RunOptions {
            init: Some((star.w.clone(), star.v.clone())),
            ..RunOptions::default()
        };
        let out = run(&p, &cfg.clone().with_rounds(3), &opts).unwrap();
        let dw = max_diff(&out.state.w, &star.w);
        let dv = max_diff(&out.state.v, &star.v);
        assert!(dw <= 1e-10 && dv <= 1e-10, "{}: {dw} {dv}", cfg.rule);
    }
}

#[test]
fn hinge_saddle_point_is_nearly_fixed() {
    let p = small_instance(60, 10, 3, LossKind::Hinge, 1.0 / 60.0, 5);
    let star = saddle_point(&p).unwrap();
    for rule in [RuleKind::Proximal1, RuleKind::Cocoa] {
        let cfg = Config::new(rule).with_rounds(1).with_inner(InnerSchedule::scheduled(1e-10, 2.0));
        let opts = RunOptions {
            init: Some((star.w.clone(), star.v.clone())),
            ..RunOptions::default()
        };
        let out = run(&p, &cfg, &opts).unwrap();
        assert!(max_diff(&out.state.v, &star.v) <= 1e-6);
    }
}

#[test]
fn every_rule_converges_on_small_ridge() {
    let p = small_instance(60, 10, 3, LossKind::Squared, 1.0 / 60.0, 9);
    for cfg in configs(&p) {
        let out = run(&p, &cfg.clone().with_rounds(500), &RunOptions::default()).unwrap();
        let last = out.trace.final_record().unwrap();
        assert_eq!(out.status, RunStatus::Completed);
        assert!(last.relative_gap < 1e-6, "{}: {}", cfg.rule, last.relative_gap);
    }
}

#[test]
fn proximal1_reaches_tight_gap_within_500_rounds() {
    let p = small_instance(60, 10, 3, LossKind::Squared, 1.0 / 60.0, 42);
    let cfg = Config::new(RuleKind::Proximal1).with_rounds(500);
    let out = run(&p, &cfg, &RunOptions::default()).unwrap();
    let hit = out.trace.records.iter().find(|r| r.relative_gap < 1e-6);
    assert!(hit.is_some());
    assert!(out.trace.records.iter().all(|r| r.gap >= -1e-12));
}

#[test]
fn hinge_runs_keep_duals_feasible_and_errors_summable() {
    let p = small_instance(80, 8, 4, LossKind::Hinge, 1.0 / 80.0, 3);
    let c = 1e-2;
    for rule in RuleKind::ALL {
        let cfg = Config::new(rule)
            .with_rounds(150)
            .with_inner(InnerSchedule::scheduled(c, 2.0));
        let opts = RunOptions {
            record_iterates: true,
            ..RunOptions::default()
        };
        let out = run(&p, &cfg, &opts).unwrap();
        let y = p.loss().labels();
        for (_, v) in out.trace.iterates.as_ref().unwrap() {
            for i in 0..p.n() {
                let t = y[i] * v[i];
                assert!((-1.0..=0.0).contains(&t), "{rule}: y·v = {t}");
            }
        }
        let cum = out.trace.final_record().unwrap().cumulative_inner_residual;
        let bound = c * std::f64::consts::PI.powi(2) / 6.0;
        assert!(cum.is_finite() && cum <= bound + 1e-12, "{rule}: {cum}");
        // each round's error respects its own tolerance
        for r in &out.trace.records {
            assert!(r.inner_residual <= c / (r.round as f64).powi(2) * (1.0 + 1e-12));
        }
    }
}

/// Minimizer of the hinge block subproblem by projected gradient descent
/// on the box, run far past convergence.
fn projected_gradient_oracle(
    g: &DMatrix<f64>,
    y: &[f64],
    n: f64,
    c: f64,
    a: &[f64],
    b: &[f64],
) -> Vec<f64> {
    let m = y.len();
    let lmax = nalgebra::SymmetricEigen::new(g.clone()).eigenvalues.max();
    let step = 1.0 / (c * lmax + 1e-12);
    let mut v = DVector::from_column_slice(a);
    let av = DVector::from_column_slice(a);
    for i in 0..m {
        v[i] = (y[i] * v[i]).clamp(-1.0, 0.0) * y[i];
    }
    for _ in 0..200_000 {
        let grad = (g * (&v - &av)) * c;
        for i in 0..m {
            let gi = y[i] / n + grad[i] - b[i];
            let t = (y[i] * (v[i] - step * gi)).clamp(-1.0, 0.0);
            v[i] = y[i] * t;
        }
    }
    v.iter().copied().collect()
}

#[test]
fn hinge_inner_solve_matches_projected_gradient() {
    let mut r = rng(21);
    let x = random_matrix(&mut r, 6, 24);
    let y: Vec<f64> = (0..24).map(|_| if r.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let p = instance_from(x, LossKind::Hinge, y.clone(), RegularizerSpec::ridge(0.1).unwrap(), 2);
    for k in 0..2 {
        let block = p.block(k);
        let m = block.len();
        let yk: Vec<f64> = block.indices().iter().map(|&i| y[i]).collect();
        let a: Vec<f64> = (0..m).map(|_| r.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..m).map(|_| r.random_range(-0.1..0.1)).collect();
        let c = 0.05;
        let sub = GramSubproblem { c, anchor: &a, linear: &b };
        let out = inner_solve(&p, k, &sub, 1e-12, 1_000_000).unwrap();
        assert!(out.converged);
        let gk = DMatrix::from_row_slice(m, m, &block.dense_gram());
        let want = projected_gradient_oracle(&gk, &yk, p.n() as f64, c, &a, &b);
        assert!(max_diff(&out.v, &want) <= 1e-8, "{:?} vs {want:?}", out.v);
        let res = subproblem_residual(&block, &p.loss().select(block.indices()), p.n(), &sub, &out.v)
            .unwrap();
        assert!(res <= 1e-12);
    }
}

#[test]
fn squared_inner_solve_matches_linear_algebra() {
    let mut r = rng(22);
    // one block with more samples than features, one with fewer
    for (d, n) in [(4, 30), (12, 10)] {
        let x = random_matrix(&mut r, d, n);
        let y: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let p = instance_from(x, LossKind::Squared, y.clone(), RegularizerSpec::ridge(0.1).unwrap(), 1);
        let a: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let c = 0.3;
        let sub = GramSubproblem { c, anchor: &a, linear: &b };
        let out = inner_solve(&p, 0, &sub, 1e-12, 10).unwrap();
        // ((1/n)I + cG) v = b − y/n + cGa
        let xm = to_dmatrix(p.x());
        let g = xm.transpose() * &xm;
        let nn = n as f64;
        let lhs = DMatrix::identity(n, n) / nn + &g * c;
        let rhs = DVector::from_vec(b.clone()) - DVector::from_vec(y.clone()) / nn
            + (&g * DVector::from_vec(a.clone())) * c;
        let want = lhs.lu().solve(&rhs).unwrap();
        assert!(max_diff(&out.v, want.as_slice()) <= 1e-10);
        assert_eq!(out.iterations, 0);
    }
}

#[test]
fn named_rounds_match_generic_round() {
    let p = small_instance(30, 5, 3, LossKind::Squared, 1.0 / 30.0, 4);
    type RoundFn = fn(&Solver<'_, f64>, &mut distpd::State) -> distpd::Result<distpd::solvers::RoundInfo>;
    let named: [(RuleKind, RoundFn); 5] = [
        (RuleKind::Consensus, round_consensus_pd),
        (RuleKind::LinConsensus, round_linconsensus_pd),
        (RuleKind::Proximal1, round_proximal1_pd),
        (RuleKind::Proximal2, round_proximal2_pd),
        (RuleKind::Cocoa, round_cocoa_pd),
    ];
    for (rule, f) in named {
        let s = Solver::new(&p, &Config::new(rule)).unwrap();
        let (mut a, mut b) = (s.init_state(), s.init_state());
        for _ in 0..5 {
            f(&s, &mut a).unwrap();
            s.round(&mut b).unwrap();
        }
        assert_eq!(a.w, b.w);
        assert_eq!(a.v, b.v);
    }
}

#[test]
fn zero_rounds_reports_initial_objectives() {
    let p = small_instance(30, 5, 3, LossKind::Squared, 1.0 / 30.0, 4);
    let out = run(&p, &Config::new(RuleKind::Proximal1).with_rounds(0), &RunOptions::default()).unwrap();
    assert!(out.trace.records.is_empty());
    // at zero: P(0) = (1/n)Σ½y², D(0) = 0
    let y = p.loss().labels();
    let p0 = y.iter().map(|v| 0.5 * v * v).sum::<f64>() / 30.0;
    assert!((out.trace.initial.primal - p0).abs() <= 1e-14);
    assert_eq!(out.trace.initial.dual, 0.0);
    assert_eq!(out.comm.scalars, 0);
}

#[test]
fn runs_are_deterministic() {
    let p = small_instance(50, 6, 5, LossKind::Hinge, 0.02, 8);
    let cfg = Config::new(RuleKind::Proximal2).with_rounds(40);
    let a = run(&p, &cfg, &RunOptions::default()).unwrap();
    let b = run(&p, &cfg, &RunOptions::default()).unwrap();
    assert_eq!(a.state.w, b.state.w);
    assert_eq!(a.state.v, b.state.v);
    let ga: Vec<f64> = a.trace.records.iter().map(|r| r.gap).collect();
    let gb: Vec<f64> = b.trace.records.iter().map(|r| r.gap).collect();
    assert_eq!(ga, gb);
}

#[test]
fn single_precision_tracks_double() {
    let p = small_instance(40, 5, 2, LossKind::Squared, 0.025, 12);
    let ds = distpd::data::SyntheticConfig {
        n: 40,
        d: 5,
        workers: 2,
        regime: distpd::data::Regime::Iid,
        target: distpd::data::Target::Dense,
        noise_std: 1.0,
        seed: 12,
    }
    .generate::<f32>()
    .unwrap();
    let p32: Problem32 = ds.instance(LossKind::Squared, RegularizerSpec::ridge(0.025f32).unwrap()).unwrap();
    let out64 = run(&p, &Config::new(RuleKind::Proximal1).with_rounds(100), &RunOptions::default()).unwrap();
    let out32 = run(
        &p32,
        &distpd::Config32::new(RuleKind::Proximal1).with_rounds(100),
        &RunOptions::default(),
    )
    .unwrap();
    for (a, b) in out64.state.w.iter().zip(&out32.state.w) {
        assert!((a - *b as f64).abs() <= 1e-4 * (1.0 + a.abs()));
    }
}

#[test]
fn lasso_gap_closes() {
    let base = small_instance(60, 10, 3, LossKind::Squared, 1.0 / 60.0, 13);
    let p = base.with_reg(RegularizerSpec::l1(0.05).unwrap());
    let out = run(&p, &Config::new(RuleKind::Proximal1).with_rho(5.0).with_rounds(2000), &RunOptions::default())
        .unwrap();
    let last = out.trace.final_record().unwrap();
    assert!(last.dual.is_finite());
    assert!(last.relative_gap < 1e-5, "{}", last.relative_gap);
}

#[test]
fn configuration_errors_name_the_field() {
    let p = small_instance(30, 5, 3, LossKind::Squared, 1.0 / 30.0, 4);
    let lasso = p.with_reg(RegularizerSpec::l1(0.1).unwrap());
    assert!(matches!(
        Solver::new(&lasso, &Config::new(RuleKind::Cocoa)),
        Err(Error::Config { .. })
    ));
    assert!(matches!(
        Solver::new(&p, &Config::new(RuleKind::Proximal1).with_rho(-1.0)),
        Err(Error::Config { field: "rho", .. })
    ));
    let h = small_instance(30, 5, 3, LossKind::Hinge, 1.0 / 30.0, 4);
    assert!(matches!(
        Solver::new(&h, &Config::new(RuleKind::Proximal1).with_inner(InnerSchedule::exact())),
        Err(Error::Config { .. })
    ));
    assert!(matches!(
        Solver::new(&h, &Config::new(RuleKind::Proximal1).with_inner(InnerSchedule::scheduled(1e-2, 1.0))),
        Err(Error::Config { field: "inner.p", .. })
    ));
}

#[test]
fn small_steps_raise_warnings() {
    let p = small_instance(30, 5, 3, LossKind::Squared, 1.0 / 30.0, 4);
    let s = Config::new(RuleKind::LinConsensus).with_tau(1e-6).resolve(&p).unwrap();
    assert!(s.warnings.iter().any(|w| w.contains("tau")));
    let s = Config::new(RuleKind::Proximal1).with_eta1(1.0).resolve(&p).unwrap();
    assert!(s.warnings.iter().any(|w| w.contains("eta1")));
    let s = Config::new(RuleKind::Proximal1).resolve(&p).unwrap();
    assert!(s.warnings.is_empty());
}

#[test]
fn exhausted_sweep_budget_is_a_stall_with_partial_trace() {
    let p = small_instance(60, 10, 3, LossKind::Hinge, 1.0 / 60.0, 6);
    let inner = InnerSchedule {
        max_sweeps: 1,
        ..InnerSchedule::scheduled(1e-12, 2.0)
    };
    let cfg = Config::new(RuleKind::Proximal1).with_rounds(20).with_inner(inner);
    let err = run(&p, &cfg, &RunOptions::default()).unwrap_err();
    assert!(matches!(err.error, Error::Stall { .. }), "{}", err.error);
    assert!(err.partial.is_some());
}
