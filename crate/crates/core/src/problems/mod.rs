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

//! Losses, regularizers, their conjugates and proximal maps.

mod ext;
mod instance;
mod loss;
mod moreau;
mod regularizer;

pub use ext::ExtReal;
pub use instance::ProblemInstance;
pub use loss::{ConjugateDomain, LossKind, LossSpec};
pub use moreau::{loss_moreau_residual, reg_moreau_residual};
pub use regularizer::{soft_threshold, RegKind, RegularizerSpec};
