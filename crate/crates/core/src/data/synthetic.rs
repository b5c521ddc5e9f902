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

//! Synthetic regression data: `y_i = ⟨x_i, w*⟩ + ε_i` with Gaussian noise.

use rand::distr::Uniform;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Normal, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{BlockPartition, FeatureMatrix};
use crate::problems::{LossKind, LossSpec, ProblemInstance, RegularizerSpec};
use crate::scalar::Scalar;

/// Length of the support of the sparse target.
pub const SPARSE_SUPPORT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `x_i ~ N(0, Σ)` with `Σ_jj = j^{-2}`.
    #[default]
    Iid,
    /// A third standard normal, a third Student-t(5), the rest uniform on
    /// `[−5, 5]`, shuffled.
    NonIid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// All-ones `w*`.
    #[default]
    Dense,
    /// First 100 coordinates one, the rest zero.
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n: usize,
    pub d: usize,
    pub workers: usize,
    pub regime: Regime,
    pub target: Target,
    pub noise_std: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            n: 3000,
            d: 500,
            workers: 30,
            regime: Regime::Iid,
            target: Target::Dense,
            noise_std: 1.0,
            seed: 0,
        }
    }
}

/// Shape and origin of a dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub n: usize,
    pub d: usize,
    pub workers: usize,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub x: FeatureMatrix<T>,
    pub labels: Vec<T>,
    pub w_star: Vec<T>,
    pub meta: DatasetMeta,
    pub warnings: Vec<String>,
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Config {
                field: "d",
                reason: "need at least one feature".into(),
            });
        }
        if self.workers == 0 || self.n < self.workers {
            return Err(Error::Config {
                field: "n",
                reason: format!(
                    "need n >= K >= 1, got n = {} and K = {}",
                    self.n, self.workers
                ),
            });
        }
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::Config {
                field: "noise_std",
                reason: format!("must be finite and nonnegative, got {}", self.noise_std),
            });
        }
        Ok(())
    }

    /// Draws the dataset. All randomness comes from one ChaCha8 stream
    /// seeded with `seed`: features sample by sample, then noise, then the
    /// sample permutation.
    pub fn generate<T: Scalar>(&self) -> Result<Dataset<T>> {
        self.validate()?;
        let (n, d) = (self.n, self.d);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut warnings = Vec::new();

        let mut w_star = vec![1.0; d];
        if self.target == Target::Sparse {
            if d < SPARSE_SUPPORT {
                warnings.push(format!(
                    "d = {d} is below the sparse support {SPARSE_SUPPORT}; using support {d}"
                ));
            }
            for w in w_star.iter_mut().skip(SPARSE_SUPPORT.min(d)) {
                *w = 0.0;
            }
        }

        let mut data = vec![0.0_f64; n * d];
        match self.regime {
            Regime::Iid => {
                for col in data.chunks_mut(d) {
                    for (j, x) in col.iter_mut().enumerate() {
                        let z: f64 = rng.sample(StandardNormal);
                        *x = z / (j + 1) as f64;
                    }
                }
            }
            Regime::NonIid => {
                let third = n / 3;
                let t5 = StudentT::new(5.0).expect("valid degrees of freedom");
                let unif = Uniform::new_inclusive(-5.0, 5.0).expect("valid range");
                for (i, col) in data.chunks_mut(d).enumerate() {
                    for x in col.iter_mut() {
                        *x = if i < third {
                            rng.sample(StandardNormal)
                        } else if i < 2 * third {
                            rng.sample(t5)
                        } else {
                            rng.sample(unif)
                        };
                    }
                }
            }
        }
        let noise = Normal::new(0.0, self.noise_std).map_err(|e| Error::Config {
            field: "noise_std",
            reason: e.to_string(),
        })?;
        let mut labels: Vec<f64> = data
            .chunks(d)
            .map(|col| {
                col.iter().zip(&w_star).map(|(a, b)| a * b).sum::<f64>() + rng.sample(noise)
            })
            .collect();

        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut shuffled = vec![0.0; n * d];
        for (dst, &src) in perm.iter().enumerate() {
            shuffled[dst * d..(dst + 1) * d].copy_from_slice(&data[src * d..(src + 1) * d]);
        }
        labels = perm.iter().map(|&src| labels[src]).collect();

        let regime = match self.regime {
            Regime::Iid => "iid",
            Regime::NonIid => "non-iid",
        };
        Ok(Dataset {
            x: FeatureMatrix::from_col_major(d, n, shuffled)?.cast(),
            labels: labels.into_iter().map(T::lit).collect(),
            w_star: w_star.into_iter().map(T::lit).collect(),
            meta: DatasetMeta {
                n,
                d,
                workers: self.workers,
                source: format!("synthetic-{regime}-seed{}", self.seed),
            },
            warnings,
        })
    }
}

impl<T: Scalar> Dataset<T> {
    /// Labels mapped to `±1` by sign (zero maps to `+1`).
    pub fn sign_labels(&self) -> Vec<T> {
        self.labels
            .iter()
            .map(|&y| if y < T::zero() { -T::one() } else { T::one() })
            .collect()
    }

    /// Builds a problem over an even contiguous split of the (already
    /// shuffled) samples. Hinge losses use the sign of the labels.
    pub fn instance(&self, loss: LossKind, reg: RegularizerSpec<T>) -> Result<ProblemInstance<T>> {
        let labels = match loss {
            LossKind::Squared => self.labels.clone(),
            LossKind::Hinge => self.sign_labels(),
        };
        ProblemInstance::new(
            self.x.clone(),
            LossSpec::new(loss, labels)?,
            reg,
            BlockPartition::contiguous(self.meta.n, self.meta.workers)?,
        )
    }
}
