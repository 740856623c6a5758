use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::seeds;

/// Row indices of one data chunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub id: usize,
    pub indices: Vec<usize>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Shuffles `0..n` with the seeded generator and cuts it into `m` contiguous
/// chunks; the first `n % m` chunks get one extra index.
pub fn partition_indices(n: usize, m: usize, seed: u64) -> Result<Vec<Partition>> {
    if m == 0 {
        return Err(Error::arg("partition count must be at least 1"));
    }
    if m > n {
        return Err(Error::arg(format!(
            "cannot cut {n} instances into {m} partitions"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeds::rng(seed));

    let base = n / m;
    let extra = n % m;
    let mut out = Vec::with_capacity(m);
    let mut start = 0;
    for id in 0..m {
        let len = base + usize::from(id < extra);
        out.push(Partition {
            id,
            indices: order[start..start + len].to_vec(),
        });
        start += len;
    }
    Ok(out)
}

pub fn partition(data: &Dataset, m: usize, seed: u64) -> Result<Vec<Partition>> {
    partition_indices(data.n(), m, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(n: usize, m: usize) -> Vec<usize> {
        partition_indices(n, m, 3).unwrap().iter().map(|p| p.len()).collect()
    }

    #[test]
    fn chunk_sizes() {
        assert_eq!(sizes(10, 2), vec![5, 5]);
        assert_eq!(sizes(10, 3), vec![4, 3, 3]);
        assert_eq!(sizes(5, 5), vec![1; 5]);
    }

    #[test]
    fn covers_range() {
        let parts = partition_indices(10, 2, 99).unwrap();
        let mut all: Vec<usize> = parts.iter().flat_map(|p| p.indices.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(
            partition_indices(50, 4, 11).unwrap(),
            partition_indices(50, 4, 11).unwrap()
        );
        assert_ne!(
            partition_indices(50, 4, 11).unwrap(),
            partition_indices(50, 4, 12).unwrap()
        );
    }

    #[test]
    fn too_many_partitions() {
        assert!(matches!(
            partition_indices(3, 4, 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(partition_indices(3, 0, 0).is_err());
    }
}
