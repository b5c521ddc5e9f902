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

//! Small dense kernels: a Cholesky factorization used by the exact inner
//! solver, and eigenvalue checks used only on verification paths.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{check_len, Error, Result};
use crate::linalg::{BlockPartition, FeatureMatrix};
use crate::scalar::{dot, Scalar};

/// Largest `n` for which [`psd_gap_check`] will densify `XᵀX`.
pub const DENSE_CHECK_LIMIT: usize = 2000;

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    // row-major, lower triangle populated
    l: Vec<T>,
}

impl<T: Scalar> Cholesky<T> {
    /// Factors the row-major `n × n` matrix `a`.
    pub fn factor(n: usize, a: &[T]) -> Result<Self> {
        check_len("cholesky input", n * n, a.len())?;
        let mut l = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let s = dot(&l[i * n..i * n + j], &l[j * n..j * n + j]);
                if i == j {
                    let diag = a[i * n + i] - s;
                    if !(diag > T::zero()) {
                        return Err(Error::InvalidData(format!(
                            "matrix not positive definite at pivot {i}"
                        )));
                    }
                    l[i * n + i] = diag.sqrt();
                } else {
                    l[i * n + j] = (a[i * n + j] - s) / l[j * n + j];
                }
            }
        }
        Ok(Self { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        let mut y = b.to_vec();
        for i in 0..n {
            let s = dot(&self.l[i * n..i * n + i], &y[..i]);
            y[i] = (y[i] - s) / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s = s - self.l[k * n + i] * y[k];
            }
            y[i] = s / self.l[i * n + i];
        }
        y
    }
}

/// Eigenvalues of a symmetric row-major matrix, ascending.
pub fn symmetric_eigenvalues(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    check_len("symmetric matrix", n * n, a.len())?;
    let m = DMatrix::from_row_slice(n, n, a);
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

/// Smallest eigenvalue of `K·diag(X_[1]ᵀX_[1], …, X_[K]ᵀX_[K]) − XᵀX`.
///
/// The block-diagonal and full Gram entries are taken from the same inner
/// products, so a single block yields an exactly zero matrix.
pub fn psd_gap_check<T: Scalar>(x: &FeatureMatrix<T>, partition: &BlockPartition) -> Result<f64> {
    let n = x.cols();
    if n > DENSE_CHECK_LIMIT {
        return Err(Error::TooLarge {
            n,
            limit: DENSE_CHECK_LIMIT,
        });
    }
    check_len("partition size", n, partition.n())?;
    let owner = partition.owners();
    let k = partition.num_blocks() as f64;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|i| x.col(i).iter().map(|v| v.as_f64()).collect())
        .collect();
    let mut diff = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let g = dot(&cols[i], &cols[j]);
            let v = if owner[i] == owner[j] { k * g - g } else { -g };
            diff[i * n + j] = v;
            diff[j * n + i] = v;
        }
    }
    Ok(symmetric_eigenvalues(n, &diff)?[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = [4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0];
        let ch = Cholesky::factor(3, &a).unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = ch.solve(&b);
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-14);
        }
        assert!(Cholesky::factor(2, &[1.0, 2.0, 2.0, 1.0]).is_err());
    }

    #[test]
    fn single_block_gap_is_exactly_zero() {
        let x = FeatureMatrix::from_rows(&[vec![1.0, 2.0, -1.0], vec![0.5, 0.3, 2.0]]).unwrap();
        let p = BlockPartition::contiguous(3, 1).unwrap();
        assert_eq!(psd_gap_check(&x, &p).unwrap(), 0.0);
    }

    #[test]
    fn orthogonal_blocks_have_nonnegative_gap() {
        // blocks live in orthogonal coordinate subspaces, so XᵀX is block
        // diagonal and the gap matrix is (K − 1)·blockdiag.
        let x = FeatureMatrix::from_rows(&[
            vec![1.0, 2.0, 0.0, 0.0],
            vec![0.5, -1.0, 0.0, 0.0],
            vec![0.0, 0.0, 3.0, 1.0],
        ])
        .unwrap();
        let p = BlockPartition::contiguous(4, 2).unwrap();
        let gap = psd_gap_check(&x, &p).unwrap();
        // block 2 Gram [[9,3],[3,1]] is singular, so the smallest eigenvalue is 0
        let b1 = symmetric_eigenvalues(2, &[1.25, 1.5, 1.5, 5.0]).unwrap()[0];
        let b2 = symmetric_eigenvalues(2, &[9.0, 3.0, 3.0, 1.0]).unwrap()[0];
        assert!(gap >= -1e-12);
        assert!(gap >= b1.min(b2) - 1e-12);
    }

    #[test]
    fn guard_refuses_large_instances() {
        let x = FeatureMatrix::<f64>::zeros(1, DENSE_CHECK_LIMIT + 1).unwrap();
        let p = BlockPartition::contiguous(DENSE_CHECK_LIMIT + 1, 1).unwrap();
        assert!(matches!(psd_gap_check(&x, &p), Err(Error::TooLarge { .. })));
    }
}
