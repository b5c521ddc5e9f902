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

//! Reference solutions and the executable checks built on them.

mod checks;
mod oracle;

pub use checks::{
    check_cor1, check_cor2a, check_cor2b, check_ergodic, check_lemma1, check_moreau, check_ppm,
    default_instance, fejer_increase, iterate_trace, CheckReport,
};
pub use oracle::{saddle_point, SaddlePoint};
