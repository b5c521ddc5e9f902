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

//! Dataset ingestion, synthetic generation and partitioning.

mod libsvm;
mod partition;
mod synthetic;

pub use libsvm::{
    binary_labels, parse_libsvm, parse_libsvm_str, write_libsvm, LibsvmData, ParseOptions,
};
pub use partition::{partition, PartitionMode};
pub use synthetic::{Dataset, DatasetMeta, Regime, SyntheticConfig, Target, SPARSE_SUPPORT};
