use std::sync::Arc;

use super::code::GlobalSizeTable;
use super::micro::MicroTreeSize;
use crate::clustering::binarize;
use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::group::IntGroup;
use crate::tree_sum::{ClusterReduction, EngineFactory, Legality, PerComponent, TreeSumEngine};

/// `⌊log2 log2 n⌋` clamped to `1..=5`, the largest `ℓ` whose table fits the cap.
pub fn linear_ell(n: usize) -> usize {
    let ll = (n.max(2) as f64).log2().log2();
    (ll.floor().max(1.0) as usize).min(5)
}

/// Tree sizes of a 0-1-weighted forest: two cluster reductions over
/// [`MicroTreeSize`]. The interface is integers only.
pub struct LinearTreeSize {
    inner: PerComponent<IntGroup>,
    legal: Legality,
    ell: usize,
}

impl LinearTreeSize {
    pub fn new(f: &RootedForest, weights: &[i64]) -> Result<Self> {
        Self::with_ell(f, weights, linear_ell(f.len()))
    }

    /// As [`LinearTreeSize::new`] with a fixed table parameter.
    pub fn with_ell(f: &RootedForest, weights: &[i64], ell: usize) -> Result<Self> {
        if let Some(&w) = weights.iter().find(|&&w| w != 0 && w != 1) {
            return Err(Error::NonBinaryWeight(w));
        }
        let table = GlobalSizeTable::shared(ell)?;
        let micro: EngineFactory<IntGroup> = Arc::new(move |f: &RootedForest, w: Vec<i64>| {
            Box::new(MicroTreeSize::new(f, &w, table.clone()).expect("clusters fit the table"))
                as Box<dyn TreeSumEngine<IntGroup> + Send>
        });
        let lower: EngineFactory<IntGroup> = Arc::new(move |f: &RootedForest, w: Vec<i64>| {
            Box::new(ClusterReduction::new(f, w, IntGroup, Some(ell), &micro).expect("binary cluster"))
                as Box<dyn TreeSumEngine<IntGroup> + Send>
        });
        let upper: EngineFactory<IntGroup> = Arc::new(move |f: &RootedForest, w: Vec<i64>| {
            Box::new(ClusterReduction::new(f, w, IntGroup, None, &lower).expect("binary component"))
                as Box<dyn TreeSumEngine<IntGroup> + Send>
        });
        let b = binarize(f, weights, 0);
        Ok(LinearTreeSize {
            inner: PerComponent::new(&b.forest, &b.weights, &upper),
            legal: Legality::new(f.parents(), f.aux_flags()),
            ell,
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn tree_sum(&mut self, v: usize) -> Result<i64> {
        self.legal.query(v)?;
        Ok(self.inner.tree_sum(v))
    }

    pub fn update_weight(&mut self, v: usize, x: i64) -> Result<()> {
        self.legal.query(v)?;
        if x != 0 && x != 1 {
            return Err(Error::NonBinaryWeight(x));
        }
        self.inner.update_weight(v, x);
        Ok(())
    }

    pub fn cut_report(&mut self, v: usize) -> Result<(i64, i64)> {
        self.legal.cut(v)?;
        Ok(self.inner.cut_report(v))
    }

    pub fn cut(&mut self, v: usize) -> Result<()> {
        self.cut_report(v).map(|_| ())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ell_choice() {
        assert_eq!([1, 4, 16, 1 << 10, 1 << 14, 1 << 16, usize::MAX].map(linear_ell), [1, 1, 2, 3, 3, 4, 5]);
    }

    #[test]
    fn unit_path_split() {
        let p: Vec<Option<usize>> = (0..100).map(|v: usize| v.checked_sub(1)).collect();
        let f = RootedForest::new(&p, &[]).unwrap();
        let mut s = LinearTreeSize::new(&f, &[1; 100]).unwrap();
        assert_eq!(s.cut_report(50).unwrap(), (50, 50));
        assert_eq!(s.tree_sum(99).unwrap(), 50);
    }

    #[test]
    fn zero_weights_and_errors() {
        let p: Vec<Option<usize>> = (0..30).map(|v: usize| v.checked_sub(1).map(|x| x / 2)).collect();
        let f = RootedForest::new(&p, &[]).unwrap();
        let mut s = LinearTreeSize::new(&f, &[0; 30]).unwrap();
        for v in (1..30).rev() {
            s.cut(v).unwrap();
            assert_eq!(s.tree_sum(v).unwrap(), 0);
        }
        assert_eq!(s.update_weight(3, 2), Err(Error::NonBinaryWeight(2)));
        assert_eq!(LinearTreeSize::new(&f, &[3; 30]).err(), Some(Error::NonBinaryWeight(3)));
    }
}
