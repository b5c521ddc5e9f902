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

//! One round of any rule, split into the server and worker halves that the
//! serial driver and the simulated network both call.

use crate::error::{check_len, Error, Result};
use crate::problems::ProblemInstance;
use crate::scalar::Scalar;
use crate::solvers::inner::{combine_residuals, LocalSolver};
use crate::solvers::{DualStep, InnerMode, InnerSchedule, IterateState, RuleKind, SolverConfig, StepParams};

/// A configured solver bound to one problem instance.
#[derive(Debug, Clone)]
pub struct Solver<'p, T> {
    problem: &'p ProblemInstance<T>,
    params: StepParams<T>,
    inner: InnerSchedule,
    locals: Vec<LocalSolver<T>>,
}

/// Server-side work done before the broadcast.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundPlan<T> {
    /// 1-based index of the round being executed.
    pub round: usize,
    /// Vector sent to every worker (length `d`).
    pub broadcast: Vec<T>,
    /// Primal iterate already produced by the server (proximal rules).
    pub w_next: Option<Vec<T>>,
    /// Per-block inner tolerance.
    pub block_tol: T,
}

/// What a worker produces: its new dual block, kept locally, and the
/// aggregate `X_[k] v_[k]` it sends back.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerReply<T> {
    pub worker: usize,
    pub v_block: Vec<T>,
    pub aggregate: Vec<T>,
    pub residual: T,
    pub iterations: usize,
}

/// Diagnostics of a completed round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundInfo {
    pub round: usize,
    /// `‖ε‖`: Euclidean norm of the per-block inner residuals.
    pub inner_residual: f64,
    /// Largest sweep count over the blocks.
    pub inner_iterations: usize,
}

impl<'p, T: Scalar> Solver<'p, T> {
    pub fn new(problem: &'p ProblemInstance<T>, cfg: &SolverConfig<T>) -> Result<Self> {
        let params = cfg.resolve(problem)?;
        Self::with_params(problem, params, cfg.inner)
    }

    pub fn with_params(
        problem: &'p ProblemInstance<T>,
        params: StepParams<T>,
        inner: InnerSchedule,
    ) -> Result<Self> {
        inner.validate(problem.loss_kind())?;
        let locals = match params.dual_step() {
            DualStep::Weighted { c } => (0..problem.num_workers())
                .map(|k| LocalSolver::new(problem, k, c))
                .collect::<Result<Vec<_>>>()?,
            DualStep::Linearized { .. } => Vec::new(),
        };
        Ok(Self {
            problem,
            params,
            inner,
            locals,
        })
    }

    pub fn problem(&self) -> &'p ProblemInstance<T> {
        self.problem
    }

    pub fn params(&self) -> &StepParams<T> {
        &self.params
    }

    pub fn rule(&self) -> RuleKind {
        self.params.rule
    }

    pub fn inner(&self) -> &InnerSchedule {
        &self.inner
    }

    pub fn init_state(&self) -> IterateState<T> {
        IterateState::zeros(self.problem.d(), self.problem.n())
    }

    /// Server step before communication.
    pub fn plan(&self, state: &IterateState<T>) -> Result<RoundPlan<T>> {
        let p = self.problem;
        check_len("state w", p.d(), state.w.len())?;
        check_len("state v", p.n(), state.v.len())?;
        let n = T::count(p.n());
        let round = state.t + 1;
        let block_tol = match self.inner.mode {
            InnerMode::Exact => T::zero(),
            InnerMode::Scheduled => {
                T::lit(self.inner.tolerance(round)) / T::count(p.num_workers()).sqrt()
            }
        };
        let (broadcast, w_next) = match self.params.rule {
            RuleKind::Consensus | RuleKind::LinConsensus => (state.w.clone(), None),
            RuleKind::Proximal1 | RuleKind::Proximal2 => {
                let rho = self.params.rho;
                let shifted: Vec<T> = state
                    .w
                    .iter()
                    .zip(&state.xv)
                    .map(|(&w, &s)| w - rho * s / n)
                    .collect();
                let w_next = p.reg().prox(rho, &shifted);
                let ext = w_next
                    .iter()
                    .zip(&state.w)
                    .map(|(&a, &b)| a + a - b)
                    .collect();
                (ext, Some(w_next))
            }
            RuleKind::Cocoa => (cocoa_primal(&state.xv, n, self.params.lambda), None),
        };
        Ok(RoundPlan {
            round,
            broadcast,
            w_next,
            block_tol,
        })
    }

    /// Worker `k`'s dual update given the broadcast and its current block.
    pub fn worker_step(
        &self,
        k: usize,
        plan: &RoundPlan<T>,
        v_block: &[T],
    ) -> Result<WorkerReply<T>> {
        let p = self.problem;
        let block = p.block(k);
        check_len("worker dual block", block.len(), v_block.len())?;
        let n = T::count(p.n());
        let xq = block.tmul_vec(&plan.broadcast)?;
        let (v_new, residual, iterations) = match self.params.dual_step() {
            DualStep::Weighted { .. } => {
                let linear: Vec<T> = xq.iter().map(|&q| q / n).collect();
                let out = self.locals[k].solve(
                    &block,
                    v_block,
                    &linear,
                    plan.block_tol,
                    self.inner.max_sweeps,
                )?;
                if !out.converged {
                    return Err(Error::Stall {
                        round: plan.round,
                        worker: k,
                        residual: out.residual.as_f64(),
                        iterations: out.iterations,
                    });
                }
                (out.v, out.residual, out.iterations)
            }
            DualStep::Linearized { s } => {
                let loss = p.loss();
                let v = block
                    .indices()
                    .iter()
                    .zip(v_block.iter().zip(&xq))
                    .map(|(&i, (&vi, &qi))| loss.prox_conj(i, s, vi + s * qi))
                    .collect();
                (v, T::zero(), 0)
            }
        };
        let aggregate = block.mul_vec(&v_new)?;
        Ok(WorkerReply {
            worker: k,
            v_block: v_new,
            aggregate,
            residual,
            iterations,
        })
    }

    /// Server step after all replies arrived; `replies[k]` must come from
    /// worker `k`. Aggregates are summed in worker order.
    pub fn finish(
        &self,
        state: &mut IterateState<T>,
        plan: RoundPlan<T>,
        replies: Vec<WorkerReply<T>>,
    ) -> Result<RoundInfo> {
        let p = self.problem;
        check_len("worker replies", p.num_workers(), replies.len())?;
        let n = T::count(p.n());
        let mut xv_new = vec![T::zero(); p.d()];
        let mut v_new = vec![T::zero(); p.n()];
        let mut residuals = Vec::with_capacity(replies.len());
        let mut iterations = 0;
        for (k, r) in replies.iter().enumerate() {
            if r.worker != k {
                return Err(Error::InvalidData(format!(
                    "reply from worker {} in slot {k}",
                    r.worker
                )));
            }
            check_len("worker aggregate", p.d(), r.aggregate.len())?;
            for (o, &a) in xv_new.iter_mut().zip(&r.aggregate) {
                *o = *o + a;
            }
            p.block(k).scatter(&r.v_block, &mut v_new);
            residuals.push(r.residual);
            iterations = iterations.max(r.iterations);
        }

        let w_new = match self.params.rule {
            RuleKind::Consensus | RuleKind::LinConsensus => {
                let bk = self.params.beta * T::count(p.num_workers());
                // w − X(2v⁺ − v)/(nβK), then prox of g/(βK)
                let shifted: Vec<T> = state
                    .w
                    .iter()
                    .zip(xv_new.iter().zip(&state.xv))
                    .map(|(&w, (&a, &b))| w - (a + a - b) / (n * bk))
                    .collect();
                p.reg().prox(T::one() / bk, &shifted)
            }
            RuleKind::Proximal1 | RuleKind::Proximal2 => plan
                .w_next
                .ok_or_else(|| Error::InvalidData("proximal round without primal step".into()))?,
            RuleKind::Cocoa => cocoa_primal(&xv_new, n, self.params.lambda),
        };

        state.w_prev = std::mem::replace(&mut state.w, w_new);
        state.v_prev = std::mem::replace(&mut state.v, v_new);
        state.xv = xv_new;
        state.t = plan.round;
        Ok(RoundInfo {
            round: plan.round,
            inner_residual: combine_residuals(&residuals).as_f64(),
            inner_iterations: iterations,
        })
    }

    /// One serial round: plan, every worker in order, finish.
    pub fn round(&self, state: &mut IterateState<T>) -> Result<RoundInfo> {
        let plan = self.plan(state)?;
        let replies = (0..self.problem.num_workers())
            .map(|k| {
                let v_block = self.problem.block(k).gather(&state.v);
                self.worker_step(k, &plan, &v_block)
            })
            .collect::<Result<Vec<_>>>()?;
        self.finish(state, plan, replies)
    }

    fn expect(&self, rule: RuleKind) -> Result<()> {
        if self.params.rule == rule {
            Ok(())
        } else {
            Err(Error::Config {
                field: "rule",
                reason: format!("solver is configured for {}, not {rule}", self.params.rule),
            })
        }
    }
}

/// `w = −X v / (nλ)`
fn cocoa_primal<T: Scalar>(xv: &[T], n: T, lambda: T) -> Vec<T> {
    xv.iter().map(|&s| -s / (n * lambda)).collect()
}

macro_rules! named_round {
    ($(#[$doc:meta])* $name:ident, $rule:expr) => {
        $(#[$doc])*
        pub fn $name<T: Scalar>(solver: &Solver<'_, T>, state: &mut IterateState<T>) -> Result<RoundInfo> {
            solver.expect($rule)?;
            solver.round(state)
        }
    };
}

named_round!(
    /// Dual block step with Gram weight `1/(n²β)` against `w`, then
    /// `w⁺ = prox_{g/(βK)}(w − X(2v⁺ − v)/(nβK))`.
    round_consensus_pd,
    RuleKind::Consensus
);
named_round!(
    /// Consensus round with the Gram weight replaced by `τI`.
    round_linconsensus_pd,
    RuleKind::LinConsensus
);
named_round!(
    /// `w⁺ = prox_{ρg}(w − ρXv/n)`, then dual block step with Gram weight
    /// `ρη1/n²` against `2w⁺ − w`.
    round_proximal1_pd,
    RuleKind::Proximal1
);
named_round!(
    /// Proximal-1 round with the Gram weight replaced by `η2 I`.
    round_proximal2_pd,
    RuleKind::Proximal2
);
named_round!(
    /// Dual block step with Gram weight `K/(n²λ)` against `w = −Xv/(nλ)`.
    round_cocoa_pd,
    RuleKind::Cocoa
);
