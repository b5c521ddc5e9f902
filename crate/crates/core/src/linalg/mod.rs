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

//! Block-partitioned data containers and the spectral/Gram primitives the
//! update rules are built from.

mod dense;
mod matrix;
mod partition;
mod spectral;

pub use dense::{psd_gap_check, symmetric_eigenvalues, Cholesky, DENSE_CHECK_LIMIT};
pub use matrix::FeatureMatrix;
pub use partition::{BlockPartition, BlockView};
pub use spectral::{
    spectral_bound, tau_star, SpectralBound, DEFAULT_SPECTRAL_MAX_ITER, DEFAULT_SPECTRAL_TOL,
};
