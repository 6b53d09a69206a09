//! Disjoint region selectors `S_r` covering the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridShape;

/// Partition of the flat indices into `count` disjoint, nonempty regions.
/// Region ids are zero-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionPartition {
    pub shape: GridShape,
    count: usize,
    membership: Vec<usize>,
}

impl RegionPartition {
    pub fn from_membership(shape: GridShape, count: usize, membership: Vec<usize>) -> Result<Self> {
        if membership.len() != shape.len() {
            return Err(Error::LengthMismatch {
                expected: shape.len(),
                got: membership.len(),
            });
        }
        if count == 0 {
            return Err(Error::InvalidRegions("zero regions".into()));
        }
        let mut sizes = vec![0usize; count];
        for (i, &r) in membership.iter().enumerate() {
            if r >= count {
                return Err(Error::InvalidRegions(format!("index {i} mapped to region {r} >= {count}")));
            }
            sizes[r] += 1;
        }
        if let Some(r) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidRegions(format!("region {r} is empty")));
        }
        Ok(Self {
            shape,
            count,
            membership,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    pub fn region_of(&self, index: usize) -> usize {
        self.membership[index]
    }

    /// Binary diagonal of `S_r`.
    pub fn selector(&self, region: usize) -> Vec<bool> {
        self.membership.iter().map(|&r| r == region).collect()
    }
}

/// Contiguous equal-size blocks in flat index order; the last block absorbs
/// the remainder.
pub fn gen_regions(shape: &GridShape, count: usize) -> Result<RegionPartition> {
    let n = shape.len();
    if count == 0 || count > n {
        return Err(Error::InvalidRegions(format!("need 1 <= R <= {n}, got {count}")));
    }
    let block = n / count;
    let membership = (0..n).map(|i| (i / block).min(count - 1)).collect();
    RegionPartition::from_membership(shape.clone(), count, membership)
}
