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

//! The round driver: runs a configured solver, records per-round
//! objectives and diagnostics, and keeps the partial trace on failure.

use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::{gap_report, ppm_residual, GapReport, PMatrix};
use crate::problems::ProblemInstance;
use crate::scalar::Scalar;
use crate::simnet::{execute_round, CommStats, MessageRecord, Network};
use crate::solvers::{IterateState, RoundInfo, Solver, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum Execution {
    /// Workers called in order on the driver thread.
    #[default]
    Serial,
    /// Simulated network with sequential workers.
    Simulated,
    /// Simulated network with one thread per worker.
    Threaded,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Keep every iterate `z_0 … z_T` in the trace.
    pub record_iterates: bool,
    /// Evaluate the proximal-point residual each round (ADMM-type rules).
    pub ppm_check: bool,
    /// Record wall-clock time per round.
    pub timing: bool,
    pub execution: Execution,
    /// Starting point; zero when unset.
    pub init: Option<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRecord {
    pub round: usize,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub ppm_residual: Option<f64>,
    /// `‖ε_t‖` of this round.
    pub inner_residual: f64,
    /// `Σ_{s≤t} ‖ε_s‖`
    pub cumulative_inner_residual: f64,
    pub inner_iterations: usize,
    /// Scalars communicated since the start.
    pub scalars: usize,
    /// Seconds since the start, when timing is on.
    pub elapsed: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace<T> {
    pub initial: GapReport<f64>,
    /// `true` when the initial gap was zero or infinite and relative gaps
    /// are really absolute gaps.
    pub relative_is_absolute: bool,
    pub records: Vec<TraceRecord>,
    /// `z_0, z_1, …` when requested.
    pub iterates: Option<Vec<(Vec<T>, Vec<T>)>>,
    /// Rounds whose gap exceeded the previous round's.
    pub gap_increases: usize,
}

impl<T> Trace<T> {
    pub fn final_record(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn inner_residuals(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.inner_residual).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum RunStatus {
    Completed,
    /// Iterates or objectives stopped being finite in this round.
    Diverged { round: usize },
}

#[derive(Debug, Clone)]
pub struct RunOutput<T> {
    pub trace: Trace<T>,
    pub state: IterateState<T>,
    pub status: RunStatus,
    pub comm: CommStats,
    /// Message envelopes, when a simulated network was used.
    pub messages: Vec<MessageRecord>,
}

/// A run aborted by an error; `partial` holds everything recorded up to
/// the failing round, or `None` when setup failed.
#[derive(Debug, Clone)]
pub struct RunFailure<T> {
    pub error: Error,
    pub partial: Option<RunOutput<T>>,
}

impl<T> std::fmt::Display for RunFailure<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

pub type RunResult<T> = std::result::Result<RunOutput<T>, Box<RunFailure<T>>>;

/// Resolves `cfg` and runs `cfg.rounds` rounds.
pub fn run<T: Scalar>(
    problem: &ProblemInstance<T>,
    cfg: &SolverConfig<T>,
    opts: &RunOptions,
) -> RunResult<T> {
    let setup = |e: Error| Box::new(RunFailure { error: e, partial: None });
    let solver = Solver::new(problem, cfg).map_err(setup)?;
    run_solver(&solver, cfg.rounds, opts)
}

/// Runs an already configured solver for `rounds` rounds.
pub fn run_solver<T: Scalar>(
    solver: &Solver<'_, T>,
    rounds: usize,
    opts: &RunOptions,
) -> RunResult<T> {
    let problem = solver.problem();
    let setup = |e: Error| Box::new(RunFailure { error: e, partial: None });
    let state = match &opts.init {
        None => solver.init_state(),
        Some((w, v)) => IterateState::from_point(
            problem,
            w.iter().map(|&x| T::lit(x)).collect(),
            v.iter().map(|&x| T::lit(x)).collect(),
        )
        .map_err(setup)?,
    };
    let pm = if opts.ppm_check {
        PMatrix::for_rule(solver.params()).ok()
    } else {
        None
    };
    let initial = gap_report(problem, &state.w, &state.v, &state.xv)
        .map_err(setup)?
        .to_f64();
    let normalizer = initial.gap;
    let relative_is_absolute = !(normalizer > 0.0 && normalizer.is_finite());

    let mut out = RunOutput {
        trace: Trace {
            initial,
            relative_is_absolute,
            records: Vec::with_capacity(rounds),
            iterates: opts
                .record_iterates
                .then(|| vec![(state.w.clone(), state.v.clone())]),
            gap_increases: 0,
        },
        state,
        status: RunStatus::Completed,
        comm: CommStats::new(problem.num_workers()),
        messages: Vec::new(),
    };
    let mut net = match opts.execution {
        Execution::Serial => None,
        Execution::Simulated => Some(Network::new(problem.num_workers(), problem.d(), false)),
        Execution::Threaded => Some(Network::new(problem.num_workers(), problem.d(), true)),
    };
    let start = Instant::now();
    let mut cumulative = 0.0;
    let mut prev_gap = initial.gap;

    for _ in 0..rounds {
        let step: Result<RoundInfo> = match net.as_mut() {
            None => solver.round(&mut out.state).inspect(|_| {
                out.comm
                    .add(&CommStats::one_round(problem.num_workers(), problem.d()))
            }),
            Some(net) => execute_round(solver, &mut out.state, net).map(|(info, delta)| {
                out.comm.add(&delta);
                info
            }),
        };
        let info = match step {
            Ok(info) => info,
            Err(error) => {
                if let Some(net) = net {
                    out.messages = net.log().to_vec();
                }
                return Err(Box::new(RunFailure {
                    error,
                    partial: Some(out),
                }));
            }
        };
        let st = &out.state;
        let report = if st.is_finite() {
            gap_report(problem, &st.w, &st.v, &st.xv)
                .map(|r| r.to_f64())
                .ok()
        } else {
            None
        };
        let ppm = match (&pm, report.is_some()) {
            (Some(pm), true) => {
                ppm_residual(problem, pm, (&st.w_prev, &st.v_prev), (&st.w, &st.v))
                    .ok()
                    .map(|r| r.max_abs)
            }
            _ => None,
        };
        cumulative += info.inner_residual;
        let (primal, dual, gap) = report.map_or((f64::NAN, f64::NAN, f64::NAN), |r| {
            (r.primal, r.dual, r.gap)
        });
        let relative_gap = if relative_is_absolute {
            gap
        } else {
            gap / normalizer
        };
        if gap > prev_gap {
            out.trace.gap_increases += 1;
        }
        prev_gap = gap;
        out.trace.records.push(TraceRecord {
            round: info.round,
            primal,
            dual,
            gap,
            relative_gap,
            ppm_residual: ppm,
            inner_residual: info.inner_residual,
            cumulative_inner_residual: cumulative,
            inner_iterations: info.inner_iterations,
            scalars: out.comm.scalars,
            elapsed: opts.timing.then(|| start.elapsed().as_secs_f64()),
        });
        if let Some(it) = out.trace.iterates.as_mut() {
            it.push((st.w.clone(), st.v.clone()));
        }
        if !primal.is_finite() || dual.is_nan() {
            out.status = RunStatus::Diverged { round: info.round };
            break;
        }
    }
    if let Some(net) = net {
        out.messages = net.log().to_vec();
    }
    Ok(out)
}
