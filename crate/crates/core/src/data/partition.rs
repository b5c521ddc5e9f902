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

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::BlockPartition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PartitionMode {
    /// Samples `0..n` split in order.
    #[default]
    Contiguous,
    /// Indices permuted by the seed before splitting.
    Shuffled,
}

/// Even split of `n` samples over `k` workers; the first `n mod k` blocks get
/// one extra sample.
pub fn partition(n: usize, k: usize, seed: u64, mode: PartitionMode) -> Result<BlockPartition> {
    if k == 0 || n < k {
        return Err(Error::InvalidPartition(format!(
            "cannot split {n} samples over {k} workers"
        )));
    }
    match mode {
        PartitionMode::Contiguous => BlockPartition::contiguous(n, k),
        PartitionMode::Shuffled => {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let (base, extra) = (n / k, n % k);
            let mut blocks = Vec::with_capacity(k);
            let mut start = 0;
            for b in 0..k {
                let len = base + usize::from(b < extra);
                blocks.push(perm[start..start + len].to_vec());
                start += len;
            }
            BlockPartition::new(n, blocks)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contiguous_sizes() {
        let p = partition(10, 3, 0, PartitionMode::Contiguous).unwrap();
        assert_eq!(p.sizes(), vec![4, 3, 3]);
        let p = partition(6, 6, 0, PartitionMode::Contiguous).unwrap();
        assert!(p.sizes().iter().all(|&s| s == 1));
        assert!(partition(2, 3, 0, PartitionMode::Contiguous).is_err());
    }

    #[test]
    fn shuffled_is_a_seeded_cover() {
        let a = partition(17, 4, 9, PartitionMode::Shuffled).unwrap();
        let b = partition(17, 4, 9, PartitionMode::Shuffled).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a.blocks().iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..17).collect::<Vec<_>>());
        assert_eq!(a.sizes(), vec![5, 4, 4, 4]);
        assert_ne!(a, partition(17, 4, 10, PartitionMode::Shuffled).unwrap());
    }
}
