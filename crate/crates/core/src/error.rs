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

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid configuration ({field}): {reason}")]
    Config { field: &'static str, reason: String },

    /// A dense verification primitive was asked to materialize a matrix that
    /// is larger than its guard.
    #[error("problem too large for dense check: n = {n} exceeds limit {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("inner solve stalled in round {round} on worker {worker}: residual {residual:e} after {iterations} sweeps")]
    Stall {
        round: usize,
        worker: usize,
        residual: f64,
        iterations: usize,
    },

    #[error("proximal matrix is not positive semidefinite: quadratic form {value:e}")]
    NotPsd { value: f64 },

    #[error("worker {worker} failed in round {round}")]
    WorkerFailure { round: usize, worker: usize },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            context,
            expected,
            got,
        })
    }
}
