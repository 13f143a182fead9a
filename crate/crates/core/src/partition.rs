//! Node-to-block assignments.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Assignment of every node to one of `block_count` blocks.
///
/// Blocks are 0-based internally; block 0 is the core (innermost layer).
/// File formats and reports use 1-based indices, converted at the I/O
/// boundary. Blocks may be empty unless a caller states otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub blocks: Vec<usize>,
    pub block_count: usize,
}

impl Partition {
    pub fn new(blocks: Vec<usize>, block_count: usize) -> Result<Self> {
        if block_count == 0 {
            return Err(Error::invalid("partition needs at least one block"));
        }
        if let Some((i, &b)) = blocks.iter().enumerate().find(|(_, &b)| b >= block_count) {
            return Err(Error::Invalid(format!(
                "node {i} assigned to block {} but only {} blocks exist",
                b + 1,
                block_count
            )));
        }
        Ok(Partition { blocks, block_count })
    }

    /// Builds from 1-based labels as found in partition CSV files.
    pub fn from_one_based(labels: &[usize]) -> Result<Self> {
        if labels.iter().any(|&b| b == 0) {
            return Err(Error::invalid("block indices in files are 1-based"));
        }
        let block_count = labels.iter().copied().max().unwrap_or(1);
        Partition::new(labels.iter().map(|&b| b - 1).collect(), block_count)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Number of nodes in each block.
    pub fn sizes(&self) -> Vec<usize> {
        let mut n = vec![0usize; self.block_count];
        for &b in &self.blocks {
            n[b] += 1;
        }
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range_block() {
        assert!(Partition::new(vec![0, 2], 2).is_err());
        assert!(Partition::new(vec![0, 1], 2).is_ok());
    }

    #[test]
    fn one_based_round_trip() {
        let p = Partition::from_one_based(&[1, 2, 1, 3]).unwrap();
        assert_eq!(p.blocks, vec![0, 1, 0, 2]);
        assert_eq!(p.block_count, 3);
        assert_eq!(p.sizes(), vec![2, 1, 1]);
    }

    #[test]
    fn zero_label_rejected() {
        assert!(Partition::from_one_based(&[0, 1]).is_err());
    }
}
