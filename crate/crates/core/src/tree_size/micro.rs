use std::sync::Arc;

use super::code::{ForestCode, GlobalSizeTable};
use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::group::IntGroup;
use crate::probe;
use crate::tree_sum::TreeSumEngine;

/// A 0-1-weighted forest of at most `ℓ` vertices held as a single code; every
/// operation is one or two table probes.
#[derive(Debug, Clone)]
pub struct MicroTreeSize {
    table: Arc<GlobalSizeTable>,
    code: u32,
    parent: Vec<Option<usize>>,
}

impl MicroTreeSize {
    /// Pads `f` with isolated zero-weight vertices up to the table's `ℓ`.
    pub fn new(f: &RootedForest, weights: &[i64], table: Arc<GlobalSizeTable>) -> Result<Self> {
        let ell = table.ell();
        if f.len() > ell {
            return Err(Error::TooLarge { n: f.len(), cap: ell });
        }
        let mut parent = f.parents().to_vec();
        parent.resize(ell, None);
        let mut bits = Vec::with_capacity(ell);
        for &w in weights {
            bits.push(u8::try_from(w).ok().filter(|&b| b <= 1).ok_or(Error::NonBinaryWeight(w))?);
        }
        bits.resize(ell, 0);
        let code = ForestCode::encode(&parent, &bits)?.bits as u32;
        Ok(MicroTreeSize { table, code, parent })
    }

    pub fn code(&self) -> u32 {
        self.code
    }
}

impl TreeSumEngine<IntGroup> for MicroTreeSize {
    fn tree_sum(&mut self, v: usize) -> i64 {
        probe::tick(1);
        self.table.tree_sum(self.code, v) as i64
    }

    fn update_weight(&mut self, v: usize, x: i64) {
        debug_assert!(x == 0 || x == 1, "0-1 weights only");
        probe::tick(1);
        self.code = self.table.set_weight(self.code, v, x != 0);
    }

    fn cut_report(&mut self, v: usize) -> (i64, i64) {
        probe::tick(3);
        let u = self.parent[v].take().expect("cut vertex has a parent");
        self.code = self.table.cut(self.code, v);
        (self.table.tree_sum(self.code, v) as i64, self.table.tree_sum(self.code, u) as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_of_two() {
        let t = GlobalSizeTable::shared(2).unwrap();
        let f = RootedForest::new(&[None, Some(0)], &[]).unwrap();
        let mut m = MicroTreeSize::new(&f, &[1, 1], t.clone()).unwrap();
        assert_eq!(m.tree_sum(1), 2);
        m.update_weight(0, 0);
        assert_eq!(m.tree_sum(1), 1);
        m.update_weight(0, 1);
        assert_eq!(m.cut_report(1), (1, 1));
        assert_eq!((m.tree_sum(0), m.tree_sum(1)), (1, 1));
    }

    #[test]
    fn padding_and_errors() {
        let t = GlobalSizeTable::shared(3).unwrap();
        let f = RootedForest::new(&[None], &[]).unwrap();
        let mut m = MicroTreeSize::new(&f, &[1], t.clone()).unwrap();
        assert_eq!(m.tree_sum(0), 1);
        assert_eq!(MicroTreeSize::new(&f, &[2], t.clone()).err(), Some(Error::NonBinaryWeight(2)));
        let big = RootedForest::new(&[None; 4], &[]).unwrap();
        assert!(matches!(MicroTreeSize::new(&big, &[0; 4], t), Err(Error::TooLarge { .. })));
    }
}
