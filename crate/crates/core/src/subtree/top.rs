use crate::clustering::binarize;
use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::trace::{ForestStructure, OpKind};
use crate::tree_sum::Legality;

use super::packed::QTable;
use super::recursive::RecursiveSubtreeSum;

/// Q-table parameter used by [`SubtreeSize`].
const Q: usize = 4;

/// Fan-out `ℓ` and depth `t` for a forest of `n` vertices:
/// `ℓ = max(2, ⌊√⌈log n⌉ / 48⌋)` rounded up to a power of two and capped at 4,
/// `t = ⌈log_ℓ(2n)⌉`.
pub fn subtree_parameters(n: usize) -> (usize, usize) {
    let b = usize::BITS - n.max(2).saturating_sub(1).leading_zeros();
    let ell = ((b as f64).sqrt() / 48.0).floor() as usize;
    let ell = ell.max(2).next_power_of_two().min(4);
    let mut t = 1;
    let mut reach = ell;
    while reach < 2 * n.max(1) {
        reach *= ell;
        t += 1;
    }
    (ell, t)
}

/// Subtree sums of a 0-1-weighted forest under cuts.
#[derive(Debug, Clone)]
pub struct SubtreeSize {
    legal: Legality,
    comp: Vec<u32>,
    local: Vec<u32>,
    parts: Vec<RecursiveSubtreeSum>,
    ell: usize,
    t: usize,
}

impl SubtreeSize {
    pub fn new(f: &RootedForest, weights: &[i64]) -> Result<Self> {
        let (ell, t) = subtree_parameters(f.len());
        Self::with_parameters(f, weights, ell, t)
    }

    pub fn with_parameters(f: &RootedForest, weights: &[i64], ell: usize, t: usize) -> Result<Self> {
        if weights.len() != f.len() {
            return Err(Error::IndexOutOfRange { index: weights.len(), len: f.len() });
        }
        if let Some(&w) = weights.iter().find(|&&w| w != 0 && w != 1) {
            return Err(Error::NonBinaryWeight(w));
        }
        let table = QTable::shared(Q)?;
        let bin = binarize(f, weights, 0);
        let (comp_of, members) = bin.forest.components();
        let mut local = vec![0u32; bin.forest.len()];
        let mut parts = Vec::with_capacity(members.len());
        for m in &members {
            for (i, &v) in m.iter().enumerate() {
                local[v] = i as u32;
            }
            let sub = bin.forest.induced(m);
            let w: Vec<i64> = m.iter().map(|&v| bin.weights[v]).collect();
            parts.push(RecursiveSubtreeSum::new(&sub, &w, ell, t, &table)?);
        }
        Ok(SubtreeSize {
            legal: Legality::new(f.parents(), f.aux_flags()),
            comp: comp_of.into_iter().map(|c| c as u32).collect(),
            local,
            parts,
            ell,
            t,
        })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn depth(&self) -> usize {
        self.t
    }

    pub fn subtree_sum(&self, v: usize) -> Result<i64> {
        self.legal.query(v)?;
        Ok(self.parts[self.comp[v] as usize].subtree_sum(self.local[v] as usize))
    }

    pub fn cut(&mut self, v: usize) -> Result<()> {
        self.legal.cut(v)?;
        self.parts[self.comp[v] as usize].cut(self.local[v] as usize)
    }

    /// Decrements issued to cluster-tree structures so far, over all levels.
    pub fn d_decrements(&self) -> u64 {
        self.parts.iter().map(|p| p.d_decrements()).sum()
    }
}

impl ForestStructure for SubtreeSize {
    fn supports(&self, kind: OpKind) -> bool {
        matches!(kind, OpKind::SubtreeSum | OpKind::Cut)
    }
    fn tree_sum(&mut self, _: usize) -> Result<i64> {
        Err(Error::IllegalOperation { index: 0, reason: "tree sums unsupported".into() })
    }
    fn subtree_sum(&mut self, v: usize) -> Result<i64> {
        SubtreeSize::subtree_sum(self, v)
    }
    fn update_weight(&mut self, _: usize, _: i64) -> Result<()> {
        Err(Error::IllegalOperation { index: 0, reason: "weight updates unsupported".into() })
    }
    fn cut(&mut self, v: usize) -> Result<()> {
        SubtreeSize::cut(self, v)
    }
}
