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

//! Unified primal-dual update rules for distributed regularized empirical
//! risk minimization.

pub mod data;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod problems;
pub mod scalar;
pub mod simnet;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision problem instance.
pub type Problem = problems::ProblemInstance<f64>;
/// Single-precision problem instance.
pub type Problem32 = problems::ProblemInstance<f32>;
pub type Config = solvers::SolverConfig<f64>;
pub type Config32 = solvers::SolverConfig<f32>;
pub type State = solvers::IterateState<f64>;
pub type State32 = solvers::IterateState<f32>;
