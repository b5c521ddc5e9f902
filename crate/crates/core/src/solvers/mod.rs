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

//! Update rules, their configuration, the inner dual solver and the round
//! driver.

mod config;
mod inner;
mod rounds;
mod run;
mod state;

pub use config::{DualStep, InnerMode, InnerSchedule, RuleKind, SolverConfig, StepParams};
pub use inner::{
    combine_residuals, inner_solve, subproblem_residual, GramSubproblem, InnerOutcome,
    LocalSolver,
};
pub use rounds::{
    round_cocoa_pd, round_consensus_pd, round_linconsensus_pd, round_proximal1_pd,
    round_proximal2_pd, RoundInfo, RoundPlan, Solver, WorkerReply,
};
pub use run::{
    run, run_solver, Execution, RunFailure, RunOptions, RunOutput, RunResult, RunStatus, Trace,
    TraceRecord,
};
pub use state::{aggregate, IterateState};
