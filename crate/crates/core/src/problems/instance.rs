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
use crate::linalg::{BlockPartition, BlockView, FeatureMatrix};
use crate::problems::{LossKind, LossSpec, RegKind, RegularizerSpec};
use crate::scalar::Scalar;

/// A regularized ERM instance split over `K` workers.
#[derive(Debug, Clone)]
pub struct ProblemInstance<T> {
    x: FeatureMatrix<T>,
    loss: LossSpec<T>,
    reg: RegularizerSpec<T>,
    partition: BlockPartition,
}

impl<T: Scalar> ProblemInstance<T> {
    pub fn new(
        x: FeatureMatrix<T>,
        loss: LossSpec<T>,
        reg: RegularizerSpec<T>,
        partition: BlockPartition,
    ) -> Result<Self> {
        check_len("labels", x.cols(), loss.len())?;
        if partition.n() != x.cols() {
            return Err(Error::InvalidPartition(format!(
                "partition covers {} samples but the matrix has {}",
                partition.n(),
                x.cols()
            )));
        }
        Ok(Self {
            x,
            loss,
            reg,
            partition,
        })
    }

    pub fn x(&self) -> &FeatureMatrix<T> {
        &self.x
    }

    pub fn loss(&self) -> &LossSpec<T> {
        &self.loss
    }

    pub fn reg(&self) -> &RegularizerSpec<T> {
        &self.reg
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    /// Number of samples.
    pub fn n(&self) -> usize {
        self.x.cols()
    }

    /// Number of features.
    pub fn d(&self) -> usize {
        self.x.rows()
    }

    /// Number of workers.
    pub fn num_workers(&self) -> usize {
        self.partition.num_blocks()
    }

    pub fn block(&self, k: usize) -> BlockView<'_, T> {
        BlockView::new(&self.x, &self.partition, k)
    }

    pub fn loss_kind(&self) -> LossKind {
        self.loss.kind()
    }

    pub fn reg_kind(&self) -> RegKind {
        self.reg.kind()
    }

    pub fn lambda(&self) -> T {
        self.reg.lambda()
    }

    /// Same data and partition under a different regularizer.
    pub fn with_reg(&self, reg: RegularizerSpec<T>) -> Self {
        Self {
            reg,
            ..self.clone()
        }
    }

    /// Same data and losses under a different partition.
    pub fn with_partition(&self, partition: BlockPartition) -> Result<Self> {
        Self::new(self.x.clone(), self.loss.clone(), self.reg, partition)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_parts() {
        let x = FeatureMatrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let reg = RegularizerSpec::ridge(0.1).unwrap();
        let loss = LossSpec::new(LossKind::Squared, vec![1.0, 2.0]).unwrap();
        let p = BlockPartition::contiguous(3, 1).unwrap();
        assert!(ProblemInstance::new(x.clone(), loss, reg, p).is_err());
        let loss = LossSpec::new(LossKind::Squared, vec![1.0, 2.0, 0.0]).unwrap();
        let p = BlockPartition::contiguous(2, 1).unwrap();
        assert!(ProblemInstance::new(x.clone(), loss.clone(), reg, p).is_err());
        let p = BlockPartition::contiguous(3, 2).unwrap();
        let inst = ProblemInstance::new(x, loss, reg, p).unwrap();
        assert_eq!((inst.n(), inst.d(), inst.num_workers()), (3, 1, 2));
        assert_eq!(inst.block(1).indices(), &[2]);
    }
}
