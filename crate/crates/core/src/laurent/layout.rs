use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::LaurentError;

/// One place-tagged group of consecutive variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Block {
    pub place: String,
    pub rank: usize,
}

/// Ordered blocks of variables; variable `j` of block `b` sits at
/// `offset(b) + j` in every exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct VariableLayout {
    blocks: Vec<Block>,
    offsets: Vec<usize>,
    len: usize,
}

impl VariableLayout {
    pub fn new(blocks: Vec<Block>) -> Result<Self, LaurentError> {
        let mut seen = BTreeSet::new();
        for b in &blocks {
            if !seen.insert(b.place.as_str()) {
                return Err(LaurentError::Layout(format!(
                    "duplicate block {:?}",
                    b.place
                )));
            }
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut len = 0;
        for b in &blocks {
            offsets.push(len);
            len += b.rank;
        }
        Ok(Self {
            blocks,
            offsets,
            len,
        })
    }

    /// A layout with no variables (constants only).
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(place: impl Into<String>, rank: usize) -> Self {
        Self::new(vec![Block {
            place: place.into(),
            rank,
        }])
        .expect("single block is always valid")
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Total variable count.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn block_index(&self, place: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.place == place)
    }

    pub fn block(&self, place: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.place == place)
    }

    pub fn offset(&self, block: usize) -> usize {
        self.offsets[block]
    }

    /// Variable range occupied by `place`.
    pub fn range(&self, place: &str) -> Option<std::ops::Range<usize>> {
        let i = self.block_index(place)?;
        Some(self.offsets[i]..self.offsets[i] + self.blocks[i].rank)
    }

    pub fn contains(&self, place: &str) -> bool {
        self.block_index(place).is_some()
    }
}
