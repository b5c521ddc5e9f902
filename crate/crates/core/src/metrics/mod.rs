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

//! Objectives, the duality-gap certificate, proximal-point matrices and the
//! residual and ergodic checks built on them.

mod ergodic;
mod objective;
mod pmatrix;
mod ppm;

pub use ergodic::{ergodic_gap_bound_check, ErgodicPoint, ErgodicReport, ERGODIC_SLACK};
pub use objective::{
    dual_objective, dual_objective_with, dual_rescale_factor, gap_report, lagrangian,
    primal_objective, relative_gap, GapReport,
};
pub use pmatrix::{p_seminorm_sq, DualWeight, PMatrix, PSD_TOLERANCE};
pub use ppm::{ppm_residual, PpmResidual};
