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

//! Executable checks of the equivalence, positivity and convergence
//! properties of the update rules, shared by the command line and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::data::{Regime, SyntheticConfig, Target};
use crate::error::{Error, Result};
use crate::linalg::{psd_gap_check, BlockPartition, FeatureMatrix};
use crate::metrics::{ergodic_gap_bound_check, p_seminorm_sq, PMatrix};
use crate::problems::{
    loss_moreau_residual, reg_moreau_residual, LossKind, LossSpec, ProblemInstance, RegularizerSpec,
};
use crate::scalar::max_abs_diff;
use crate::solvers::{
    run_solver, InnerSchedule, RuleKind, RunOptions, Solver, SolverConfig, Trace,
};
use crate::verify::saddle_point;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// The quantity compared against `tolerance`.
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Further named measurements.
    pub details: Vec<(String, f64)>,
}

impl CheckReport {
    fn new(name: &str, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            passed: max_deviation <= tolerance,
            max_deviation,
            tolerance,
            details: Vec::new(),
        }
    }

    fn detail(mut self, key: &str, value: f64) -> Self {
        self.details.push((key.to_string(), value));
        self
    }
}

/// Ridge regression on `n = 60, d = 10, K = 3` synthetic samples with
/// `λ = 1/n`.
pub fn default_instance(seed: u64) -> Result<ProblemInstance<f64>> {
    let cfg = SyntheticConfig {
        n: 60,
        d: 10,
        workers: 3,
        regime: Regime::Iid,
        target: Target::Dense,
        noise_std: 1.0,
        seed,
    };
    let ds = cfg.generate::<f64>()?;
    ds.instance(LossKind::Squared, RegularizerSpec::ridge(1.0 / 60.0)?)
}

fn inner_for(problem: &ProblemInstance<f64>) -> InnerSchedule {
    match problem.loss_kind() {
        LossKind::Squared => InnerSchedule::exact(),
        LossKind::Hinge => InnerSchedule::scheduled(1e-2, 2.0),
    }
}

/// Runs `cfg` for `rounds` rounds keeping every iterate.
pub fn iterate_trace(
    problem: &ProblemInstance<f64>,
    cfg: &SolverConfig<f64>,
    rounds: usize,
    ppm_check: bool,
) -> Result<Trace<f64>> {
    let solver = Solver::new(problem, cfg)?;
    let opts = RunOptions {
        record_iterates: true,
        ppm_check,
        ..RunOptions::default()
    };
    run_solver(&solver, rounds, &opts)
        .map(|o| o.trace)
        .map_err(|f| f.error)
}

fn iterates(trace: &Trace<f64>) -> &[(Vec<f64>, Vec<f64>)] {
    trace.iterates.as_deref().unwrap_or(&[])
}

fn max_dual_deviation(a: &Trace<f64>, b: &Trace<f64>, rounds: usize) -> f64 {
    (0..=rounds)
        .map(|t| max_abs_diff(&iterates(a)[t].1, &iterates(b)[t].1))
        .fold(0.0, f64::max)
}

/// Dual iterates of CoCoA and Proximal-1 with `ρ = 1/λ`, `η1 = K` coincide,
/// and the Proximal-1 primal is the running average
/// `w_{t+1} = ½(w_t − X v_t/(nλ))` of the CoCoA primal.
pub fn check_cor1(problem: &ProblemInstance<f64>, rounds: usize) -> Result<CheckReport> {
    let k = problem.num_workers() as f64;
    let lambda = problem.lambda();
    let inner = inner_for(problem);
    let cocoa = iterate_trace(
        problem,
        &SolverConfig::new(RuleKind::Cocoa).with_inner(inner),
        rounds,
        false,
    )?;
    let prox = iterate_trace(
        problem,
        &SolverConfig::new(RuleKind::Proximal1)
            .with_rho(1.0 / lambda)
            .with_eta1(k)
            .with_inner(inner),
        rounds,
        false,
    )?;
    let dual = max_dual_deviation(&cocoa, &prox, rounds);
    let mut avg = 0.0_f64;
    for t in 0..rounds {
        let (w_prox, _) = &iterates(&prox)[t];
        let (w_next, _) = &iterates(&prox)[t + 1];
        let (w_cocoa, _) = &iterates(&cocoa)[t];
        for j in 0..w_prox.len() {
            let want = 0.5 * (w_prox[j] + w_cocoa[j]);
            avg = avg.max((w_next[j] - want).abs());
        }
    }
    Ok(CheckReport::new("cor1", dual.max(avg), 1e-8)
        .detail("dual_deviation", dual)
        .detail("primal_average_deviation", avg))
}

/// Consensus-type rule against its proximal counterpart under `βK = 1/ρ`.
///
/// Dual iterates coincide. The consensus primal equals the proximal
/// extrapolation `2w_{t+1} − w_t`, so both deviations are checked; the raw
/// primal distance, which only vanishes in the limit, is reported alongside.
fn check_cor2(
    name: &str,
    problem: &ProblemInstance<f64>,
    consensus: SolverConfig<f64>,
    proximal: SolverConfig<f64>,
    rounds: usize,
) -> Result<CheckReport> {
    let a = iterate_trace(problem, &consensus, rounds, false)?;
    let b = iterate_trace(problem, &proximal, rounds + 1, false)?;
    let dual = max_dual_deviation(&a, &b, rounds);
    let mut corr = 0.0_f64;
    let mut raw = 0.0_f64;
    for t in 0..=rounds {
        let (w_c, _) = &iterates(&a)[t];
        let (w_p, _) = &iterates(&b)[t];
        let (w_p_next, _) = &iterates(&b)[t + 1];
        for j in 0..w_c.len() {
            corr = corr.max((w_c[j] - (2.0 * w_p_next[j] - w_p[j])).abs());
            raw = raw.max((w_c[j] - w_p[j]).abs());
        }
    }
    Ok(CheckReport::new(name, dual.max(corr), 1e-8)
        .detail("dual_deviation", dual)
        .detail("primal_extrapolation_deviation", corr)
        .detail("raw_primal_deviation", raw))
}

/// Consensus vs Proximal-1 with `η1 = K`.
pub fn check_cor2a(problem: &ProblemInstance<f64>, rho: f64, rounds: usize) -> Result<CheckReport> {
    let k = problem.num_workers() as f64;
    let inner = inner_for(problem);
    check_cor2(
        "cor2a",
        problem,
        SolverConfig::new(RuleKind::Consensus)
            .with_beta(1.0 / (rho * k))
            .with_inner(inner),
        SolverConfig::new(RuleKind::Proximal1)
            .with_rho(rho)
            .with_eta1(k)
            .with_inner(inner),
        rounds,
    )
}

/// LinConsensus vs Proximal-2 with `η2 = Kτ`.
pub fn check_cor2b(problem: &ProblemInstance<f64>, rho: f64, rounds: usize) -> Result<CheckReport> {
    let k = problem.num_workers() as f64;
    let inner = inner_for(problem);
    let lin = SolverConfig::new(RuleKind::LinConsensus)
        .with_beta(1.0 / (rho * k))
        .with_inner(inner);
    let tau = lin.resolve(problem)?.tau;
    check_cor2(
        "cor2b",
        problem,
        lin.with_tau(tau),
        SolverConfig::new(RuleKind::Proximal2)
            .with_rho(rho)
            .with_eta2(k * tau)
            .with_inner(inner),
        rounds,
    )
}

/// Smallest eigenvalue of `K·blockdiag(X_kᵀX_k) − XᵀX` over random
/// instances, plus the single-block equality case.
pub fn check_lemma1(count: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    let mut single = 0.0_f64;
    for _ in 0..count {
        let d = rng.random_range(1..=20);
        let k = rng.random_range(1..=6);
        let n = rng.random_range(k.max(2)..=60);
        let data: Vec<f64> = (0..d * n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = FeatureMatrix::from_col_major(d, n, data)?;
        let p = BlockPartition::contiguous(n, k)?;
        worst = worst.min(psd_gap_check(&x, &p)?);
        single = single.max(psd_gap_check(&x, &BlockPartition::contiguous(n, 1)?)?.abs());
    }
    let mut r = CheckReport::new("lemma1", (-worst).max(0.0), 1e-8)
        .detail("min_eigenvalue", worst)
        .detail("single_block_abs_eigenvalue", single);
    r.passed &= single <= 1e-10;
    Ok(r)
}

fn admm_configs(problem: &ProblemInstance<f64>) -> Vec<SolverConfig<f64>> {
    let k = problem.num_workers() as f64;
    let rho = 1.0 / problem.lambda();
    let inner = inner_for(problem);
    RuleKind::ADMM
        .iter()
        .map(|&rule| {
            let cfg = SolverConfig::new(rule).with_inner(inner);
            match rule {
                RuleKind::Consensus | RuleKind::LinConsensus => cfg.with_beta(1.0 / (rho * k)),
                _ => cfg.with_rho(rho),
            }
        })
        .collect()
}

/// Largest per-round proximal-point residual over the four ADMM-type rules.
pub fn check_ppm(problem: &ProblemInstance<f64>, rounds: usize) -> Result<CheckReport> {
    let mut worst = 0.0_f64;
    let mut details = Vec::new();
    for cfg in admm_configs(problem) {
        let tr = iterate_trace(problem, &cfg, rounds, true)?;
        let m = tr
            .records
            .iter()
            .filter_map(|r| r.ppm_residual)
            .fold(0.0, f64::max);
        details.push((cfg.rule.name().to_string(), m));
        worst = worst.max(m);
    }
    let tol = match problem.loss_kind() {
        LossKind::Squared => 1e-9,
        // inexact inner solves leave a residual of the order of ε
        LossKind::Hinge => 1e-2,
    };
    let mut r = CheckReport::new("ppm", worst, tol);
    r.details = details;
    Ok(r)
}

/// Ergodic Lagrangian-gap bound for every `T` and Fejér monotonicity in the
/// `P`-seminorm, for the four ADMM-type rules.
pub fn check_ergodic(problem: &ProblemInstance<f64>, rounds: usize) -> Result<CheckReport> {
    let star = saddle_point(problem)?;
    let inexact = problem.loss_kind() != LossKind::Squared;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut fejer_worst = f64::NEG_INFINITY;
    let mut details = Vec::new();
    let mut all_hold = true;
    for cfg in admm_configs(problem) {
        let solver = Solver::new(problem, &cfg)?;
        let pm = PMatrix::for_rule(solver.params())?;
        let tr = iterate_trace(problem, &cfg, rounds, false)?;
        let eps = tr.inner_residuals();
        let report = ergodic_gap_bound_check(
            problem,
            &pm,
            iterates(&tr),
            (&star.w, &star.v),
            inexact.then_some(eps.as_slice()),
        )?;
        let excess = report
            .points
            .iter()
            .map(|p| p.lhs - p.rhs - p.inexact)
            .fold(f64::NEG_INFINITY, f64::max);
        let fejer = fejer_increase(problem, &pm, iterates(&tr), (&star.w, &star.v))?;
        all_hold &= report.all_hold && (inexact || fejer <= 1e-10);
        worst_excess = worst_excess.max(excess);
        fejer_worst = fejer_worst.max(fejer);
        details.push((format!("{}_max_excess", cfg.rule.name()), excess));
        details.push((format!("{}_fejer_increase", cfg.rule.name()), fejer));
    }
    Ok(CheckReport {
        name: "ergodic".into(),
        passed: all_hold,
        max_deviation: worst_excess,
        tolerance: crate::metrics::ERGODIC_SLACK,
        details,
    })
}

/// Largest one-step increase of `‖z_t − z*‖_P` along a trajectory.
pub fn fejer_increase(
    problem: &ProblemInstance<f64>,
    pm: &PMatrix<f64>,
    iterates: &[(Vec<f64>, Vec<f64>)],
    (w_star, v_star): (&[f64], &[f64]),
) -> Result<f64> {
    let dist = |w: &[f64], v: &[f64]| -> Result<f64> {
        let dw: Vec<f64> = w.iter().zip(w_star).map(|(a, b)| a - b).collect();
        let dv: Vec<f64> = v.iter().zip(v_star).map(|(a, b)| a - b).collect();
        Ok(p_seminorm_sq(pm, problem, &dw, &dv)?.sqrt())
    };
    let mut prev = None;
    let mut worst = f64::NEG_INFINITY;
    for (w, v) in iterates {
        let cur = dist(w, v)?;
        if let Some(p) = prev {
            worst = worst.max(cur - p);
        }
        prev = Some(cur);
    }
    Ok(worst)
}

/// Decomposition residual of every implemented `(f, f*)` pair over random
/// step sizes and points.
pub fn check_moreau(draws: usize, seed: u64) -> Result<CheckReport> {
    if draws == 0 {
        return Err(Error::Config {
            field: "draws",
            reason: "need at least one draw".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = [0.0_f64; 4];
    for _ in 0..draws {
        let s: f64 = 10f64.powf(rng.random_range(-2.0..1.0));
        let x: f64 = rng.random_range(-10.0..10.0);
        let y: f64 = rng.random_range(-5.0..5.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let lambda: f64 = 10f64.powf(rng.random_range(-3.0..1.0));
        let sq = LossSpec::new(LossKind::Squared, vec![y])?;
        let hi = LossSpec::new(LossKind::Hinge, vec![sign])?;
        worst[0] = worst[0].max(loss_moreau_residual(&sq, 0, s, x).abs());
        worst[1] = worst[1].max(loss_moreau_residual(&hi, 0, s, x).abs());
        let xs = [x, -0.5 * x, 0.1 * x];
        worst[2] = worst[2].max(reg_moreau_residual(&RegularizerSpec::ridge(lambda)?, s, &xs));
        worst[3] = worst[3].max(reg_moreau_residual(&RegularizerSpec::l1(lambda)?, s, &xs));
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    Ok(CheckReport::new("moreau", max, 1e-10)
        .detail("squared", worst[0])
        .detail("hinge", worst[1])
        .detail("ridge", worst[2])
        .detail("l1", worst[3]))
}
