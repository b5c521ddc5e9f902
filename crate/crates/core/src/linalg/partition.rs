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

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::FeatureMatrix;
use crate::scalar::{axpy, dot, norm_sq, Scalar};

/// Assignment of the `n` samples to `K` workers.
///
/// Indices are zero-based and each block is kept in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl BlockPartition {
    /// Validates that `blocks` is a disjoint cover of `0..n` with no empty
    /// block. Each block is sorted.
    pub fn new(n: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("need at least one block".into()));
        }
        let mut seen = vec![false; n];
        for (k, b) in blocks.iter_mut().enumerate() {
            if b.is_empty() {
                return Err(Error::InvalidPartition(format!("block {k} is empty")));
            }
            b.sort_unstable();
            for &i in b.iter() {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} in block {k} out of range 0..{n}"
                    )));
                }
                if std::mem::replace(&mut seen[i], true) {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} assigned more than once"
                    )));
                }
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("index {i} not assigned")));
        }
        Ok(Self { n, blocks })
    }

    /// Even contiguous split; the first `n mod K` blocks get one extra sample.
    pub fn contiguous(n: usize, k: usize) -> Result<Self> {
        if k == 0 || n < k {
            return Err(Error::InvalidPartition(format!(
                "cannot split {n} samples over {k} workers"
            )));
        }
        let base = n / k;
        let extra = n % k;
        let mut blocks = Vec::with_capacity(k);
        let mut start = 0;
        for b in 0..k {
            let len = base + usize::from(b < extra);
            blocks.push((start..start + len).collect());
            start += len;
        }
        Self::new(n, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block(&self, k: usize) -> &[usize] {
        &self.blocks[k]
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    /// Block id of every sample.
    pub fn owners(&self) -> Vec<usize> {
        let mut owner = vec![0; self.n];
        for (k, b) in self.blocks.iter().enumerate() {
            for &i in b {
                owner[i] = k;
            }
        }
        owner
    }
}

/// Worker `k`'s share of the data: the columns `X_[k]` selected by the
/// partition, addressed without copying.
#[derive(Debug, Clone, Copy)]
pub struct BlockView<'a, T> {
    k: usize,
    x: &'a FeatureMatrix<T>,
    idx: &'a [usize],
}

impl<'a, T: Scalar> BlockView<'a, T> {
    pub fn new(x: &'a FeatureMatrix<T>, partition: &'a BlockPartition, k: usize) -> Self {
        debug_assert_eq!(x.cols(), partition.n());
        Self {
            k,
            x,
            idx: partition.block(k),
        }
    }

    pub fn worker(&self) -> usize {
        self.k
    }

    /// Local sample count `n_k`.
    pub fn len(&self) -> usize {
        self.idx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.idx.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.rows()
    }

    /// Global indices owned by this worker, ascending.
    pub fn indices(&self) -> &'a [usize] {
        self.idx
    }

    /// Local column `j` (global sample `indices()[j]`).
    pub fn col(&self, j: usize) -> &'a [T] {
        self.x.col(self.idx[j])
    }

    /// `X_[k] u` for a local vector `u` of length `n_k`.
    pub fn mul_vec(&self, u: &[T]) -> Result<Vec<T>> {
        check_len("X_[k] u", self.len(), u.len())?;
        let mut out = vec![T::zero(); self.dim()];
        for (j, &uj) in u.iter().enumerate() {
            if uj != T::zero() {
                axpy(uj, self.col(j), &mut out);
            }
        }
        Ok(out)
    }

    /// `X_[k]ᵀ w`, length `n_k`.
    pub fn tmul_vec(&self, w: &[T]) -> Result<Vec<T>> {
        check_len("X_[k]^T w", self.dim(), w.len())?;
        Ok((0..self.len()).map(|j| dot(self.col(j), w)).collect())
    }

    /// Local slice `v_[k]` of a global dual vector.
    pub fn gather(&self, v: &[T]) -> Vec<T> {
        self.idx.iter().map(|&i| v[i]).collect()
    }

    /// Writes a local slice back into a global dual vector.
    pub fn scatter(&self, local: &[T], v: &mut [T]) {
        debug_assert_eq!(local.len(), self.len());
        for (&i, &x) in self.idx.iter().zip(local) {
            v[i] = x;
        }
    }

    /// `‖u‖²` in the Gram seminorm `X_[k]ᵀX_[k]`, i.e. `‖X_[k] u‖²`.
    pub fn gram_seminorm_sq(&self, u: &[T]) -> Result<T> {
        Ok(norm_sq(&self.mul_vec(u)?))
    }

    /// `X_[k]ᵀ X_[k] u` as two matrix-vector products.
    pub fn gram_mul(&self, u: &[T]) -> Result<Vec<T>> {
        self.tmul_vec(&self.mul_vec(u)?)
    }

    /// Dense local Gram matrix `X_[k]ᵀX_[k]` in row-major order.
    pub fn dense_gram(&self) -> Vec<T> {
        let m = self.len();
        let mut g = vec![T::zero(); m * m];
        for a in 0..m {
            for b in a..m {
                let v = dot(self.col(a), self.col(b));
                g[a * m + b] = v;
                g[b * m + a] = v;
            }
        }
        g
    }

    /// Dense `X_[k] X_[k]ᵀ` (d × d), row-major.
    pub fn dense_outer_gram(&self) -> Vec<T> {
        let d = self.dim();
        let mut g = vec![T::zero(); d * d];
        for j in 0..self.len() {
            let c = self.col(j);
            for a in 0..d {
                if c[a] == T::zero() {
                    continue;
                }
                for b in a..d {
                    g[a * d + b] = g[a * d + b] + c[a] * c[b];
                }
            }
        }
        for a in 0..d {
            for b in 0..a {
                g[a * d + b] = g[b * d + a];
            }
        }
        g
    }

    pub fn frobenius_sq(&self) -> T {
        (0..self.len()).map(|j| norm_sq(self.col(j))).sum()
    }
}
