use std::fmt;

use crate::error::{Error, Result};

/// A sorted, duplicate-free subset of `{0, .., dim-1}`. The empty set is legal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordSubset {
    dim: usize,
    indices: Vec<usize>,
}

impl CoordSubset {
    /// Validates that `indices` is strictly increasing and in range.
    pub fn new(dim: usize, indices: Vec<usize>) -> Result<Self> {
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(Error::ContractViolation(format!(
                    "index {last} out of range for dimension {dim}"
                )));
            }
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ContractViolation(
                "subset indices must be strictly increasing".into(),
            ));
        }
        Ok(Self { dim, indices })
    }

    /// Sorts and deduplicates before validating the range.
    pub fn from_unsorted(dim: usize, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(dim, indices)
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            indices: Vec::new(),
        }
    }

    pub fn full(dim: usize) -> Self {
        Self {
            dim,
            indices: (0..dim).collect(),
        }
    }

    /// Subset encoded by the set bits of `mask` (bit `i` ↔ index `i`).
    pub fn from_mask(dim: usize, mask: u64) -> Self {
        debug_assert!(dim <= 64);
        Self {
            dim,
            indices: (0..dim).filter(|&i| mask >> i & 1 == 1).collect(),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    #[inline]
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }
}

impl fmt::Display for CoordSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
