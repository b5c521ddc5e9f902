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

use crate::error::{check_len, Error, Result};
use crate::scalar::{axpy, dot, Scalar};

/// Dense `d × n` data matrix whose columns are samples.
///
/// Storage is column-major so that a sample `x_i` is one contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> FeatureMatrix<T> {
    /// Builds a matrix from column-major entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidData(format!(
                "feature matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        check_len("feature matrix entries", rows * cols, data.len())?;
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite entry at row {}, column {}",
                pos % rows,
                pos / rows
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a list of sample columns of equal length.
    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            check_len("feature column", rows, c.len())?;
            data.extend_from_slice(c);
        }
        Self::from_col_major(rows, columns.len(), data)
    }

    /// Builds a matrix from row-major nested rows (convenient in tests).
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let d = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut data = vec![T::zero(); d * n];
        for (r, row) in rows.iter().enumerate() {
            check_len("feature row", n, row.len())?;
            for (c, &v) in row.iter().enumerate() {
                data[c * d + r] = v;
            }
        }
        Self::from_col_major(d, n, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::from_col_major(rows, cols, vec![T::zero(); rows * cols])
    }

    /// Number of features `d`.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of samples `n`.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn col(&self, i: usize) -> &[T] {
        &self.data[i * self.rows..(i + 1) * self.rows]
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.data[c * self.rows + r]
    }

    pub fn as_col_major(&self) -> &[T] {
        &self.data
    }

    /// `X v`, length `d`.
    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        check_len("X v", self.cols, v.len())?;
        let mut out = vec![T::zero(); self.rows];
        for (i, &vi) in v.iter().enumerate() {
            if vi != T::zero() {
                axpy(vi, self.col(i), &mut out);
            }
        }
        Ok(out)
    }

    /// `Xᵀ w`, length `n`.
    pub fn tmul_vec(&self, w: &[T]) -> Result<Vec<T>> {
        check_len("X^T w", self.rows, w.len())?;
        Ok((0..self.cols).map(|i| dot(self.col(i), w)).collect())
    }

    pub fn frobenius_sq(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc + x * x)
    }

    /// Converts the entries into another scalar type.
    pub fn cast<U: Scalar>(&self) -> FeatureMatrix<U> {
        FeatureMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| U::lit(x.as_f64())).collect(),
        }
    }

    /// Matrix restricted to the given columns, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(self.rows * idx.len());
        for &i in idx {
            if i >= self.cols {
                return Err(Error::InvalidData(format!("column {i} out of range")));
            }
            data.extend_from_slice(self.col(i));
        }
        Self::from_col_major(self.rows, idx.len(), data)
    }
}
