//! Partial sums over an array whose positions are overwritten once each, in order.
//!
//! Positions are 0-based. After `p` updates, positions `0..p` hold their new values
//! and the rest their initial ones, so every prefix sum is two table lookups.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct BlockPartialSum {
    /// Prefix sums of the initial array, with a leading 0.
    initial: Vec<i64>,
    /// Prefix sums of the updated positions, with a leading 0.
    updated: Vec<i64>,
}

pub fn block_partial_sum(b: &[i64]) -> BlockPartialSum {
    let mut initial = Vec::with_capacity(b.len() + 1);
    initial.push(0);
    for &x in b {
        initial.push(initial.last().unwrap() + x);
    }
    let mut updated = Vec::with_capacity(b.len() + 1);
    updated.push(0);
    BlockPartialSum { initial, updated }
}

impl BlockPartialSum {
    pub fn len(&self) -> usize {
        self.initial.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of updates applied so far.
    pub fn updates(&self) -> usize {
        self.updated.len() - 1
    }

    pub fn update(&mut self, pos: usize, x: i64) -> Result<()> {
        let expected = self.updates();
        if pos != expected || pos >= self.len() {
            return Err(Error::OutOfOrderUpdate { expected, got: pos });
        }
        self.updated.push(self.updated[pos] + x);
        Ok(())
    }

    /// Sum of positions `0..=i`.
    pub fn query(&self, i: usize) -> Result<i64> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.len() });
        }
        let p = self.updates();
        Ok(if i < p { self.updated[i + 1] } else { self.updated[p] + self.initial[i + 1] - self.initial[p] })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basics() {
        let mut s = block_partial_sum(&[3, 4, 5]);
        assert_eq!(s.query(2), Ok(12));
        s.update(0, 10).unwrap();
        assert_eq!(s.query(0), Ok(10));
        assert_eq!(s.query(2), Ok(19));
        assert_eq!(s.update(2, 1), Err(Error::OutOfOrderUpdate { expected: 1, got: 2 }));
    }
}
