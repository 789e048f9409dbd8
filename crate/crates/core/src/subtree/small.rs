use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::probe;

use super::packed::{PackedCounters, QTable};

/// Largest forest a [`SmallSubtreeSum`] accepts; descendant sets are `u64` masks.
pub const SMALL_MAX: usize = 64;

/// Subtree sums with delayed decrements on a forest of at most 64 vertices.
///
/// `A[v]` holds the subtree sum of `v` as of the last flush, `B` counts the
/// decrements per vertex since then and `C[v]` is the live descendant set of `v`.
/// A query is `A[v] - Q[B, C[v]]`, evaluated one `q`-vertex chunk at a time with
/// a Q table of parameter `q`; every `q` decrements the counters are folded into
/// `A` and reset.
#[derive(Debug, Clone)]
pub struct SmallSubtreeSum {
    table: Arc<QTable>,
    q: usize,
    parent: Vec<Option<usize>>,
    order: Vec<usize>,
    a: Vec<i64>,
    b: Vec<PackedCounters>,
    c: Vec<u64>,
    base: Vec<i64>,
    pending: usize,
    flushes: u64,
    root: usize,
}

impl SmallSubtreeSum {
    pub fn new(f: &RootedForest, weights: &[i64], table: Arc<QTable>) -> Result<Self> {
        let n = f.len();
        if n > SMALL_MAX {
            return Err(Error::TooLarge { n, cap: SMALL_MAX });
        }
        if weights.len() != n {
            return Err(Error::IndexOutOfRange { index: weights.len(), len: n });
        }
        if let Some(v) = weights.iter().position(|&w| w < 0) {
            return Err(Error::NegativeWeight(v));
        }
        let q = table.k();
        let mut s = SmallSubtreeSum {
            q,
            parent: f.parents().to_vec(),
            order: f.preorder(),
            a: vec![0; n],
            b: vec![PackedCounters::zero(q); n.div_ceil(q)],
            c: vec![0; n],
            base: weights.to_vec(),
            pending: 0,
            flushes: 0,
            root: f.roots().next().unwrap_or(0),
            table,
        };
        s.rebuild();
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn flushes(&self) -> u64 {
        self.flushes
    }

    pub fn pending(&self) -> usize {
        self.pending
    }

    /// Vertex whose subtree sum [`root_sum`](Self::root_sum) reports.
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    fn power(&self, v: usize) -> u64 {
        self.table.power(v % self.q)
    }

    /// Current weight of `v`.
    pub fn weight(&self, v: usize) -> i64 {
        self.base[v] - self.b[v / self.q].counter(self.power(v)) as i64
    }

    fn pending_in(&self, v: usize) -> i64 {
        let mask = (1u64 << self.q) - 1;
        let set = self.c[v];
        let mut total = 0i64;
        for (j, &b) in self.b.iter().enumerate() {
            let part = (set >> (j * self.q)) & mask;
            if !b.is_zero() && part != 0 {
                total += self.table.get(b, part) as i64;
            }
        }
        probe::tick(self.b.len() as u64);
        total
    }

    pub fn subtree_sum(&self, v: usize) -> i64 {
        self.a[v] - self.pending_in(v)
    }

    pub fn root_sum(&self) -> i64 {
        self.subtree_sum(self.root)
    }

    pub fn decrement_weight(&mut self, v: usize) -> Result<()> {
        if v >= self.len() {
            return Err(Error::IndexOutOfRange { index: v, len: self.len() });
        }
        if self.weight(v) <= 0 {
            return Err(Error::NegativeWeight(v));
        }
        let p = self.power(v);
        self.b[v / self.q].increment(p);
        self.pending += 1;
        probe::tick(1);
        if self.pending == self.q {
            self.flush();
        }
        Ok(())
    }

    /// Folds pending decrements into `A` and clears `B`.
    pub fn flush(&mut self) {
        if self.pending == 0 {
            return;
        }
        for v in 0..self.len() {
            self.a[v] -= self.pending_in(v);
        }
        for v in 0..self.len() {
            self.base[v] = self.weight(v);
        }
        for b in &mut self.b {
            b.clear();
        }
        self.pending = 0;
        self.flushes += 1;
    }

    pub fn cut(&mut self, v: usize) -> Result<()> {
        if v >= self.len() {
            return Err(Error::IndexOutOfRange { index: v, len: self.len() });
        }
        if self.parent[v].is_none() {
            return Err(Error::NoParent(v));
        }
        self.flush();
        // After a flush the weights are A[v] minus the children's A values.
        let mut w = self.a.clone();
        for u in 0..self.len() {
            if let Some(p) = self.parent[u] {
                w[p] -= self.a[u];
            }
        }
        debug_assert_eq!(w, self.base);
        self.base = w;
        self.parent[v] = None;
        self.rebuild();
        Ok(())
    }

    fn rebuild(&mut self) {
        let n = self.len();
        for v in 0..n {
            self.a[v] = self.base[v];
            self.c[v] = 1 << v;
        }
        for i in (0..n).rev() {
            let v = self.order[i];
            if let Some(p) = self.parent[v] {
                self.a[p] += self.a[v];
                self.c[p] |= self.c[v];
            }
        }
        probe::tick(n as u64);
    }

    /// Compares every stored quantity with a from-scratch computation.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.len();
        let mut sums: Vec<i64> = (0..n).map(|v| self.weight(v)).collect();
        let mut sets: Vec<u64> = (0..n).map(|v| 1 << v).collect();
        for i in (0..n).rev() {
            let v = self.order[i];
            if let Some(p) = self.parent[v] {
                sums[p] += sums[v];
                sets[p] |= sets[v];
            }
        }
        if sets != self.c {
            return Err(Error::InvariantBroken("descendant sets out of date".into()));
        }
        if self.pending >= self.q {
            return Err(Error::InvariantBroken(format!("{} pending decrements", self.pending)));
        }
        for v in 0..n {
            if self.subtree_sum(v) != sums[v] {
                return Err(Error::InvariantBroken(format!("subtree sum of {v}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> RootedForest {
        let parents: Vec<Option<usize>> = (0..n).map(|v| v.checked_sub(1)).collect();
        RootedForest::new(&parents, &[]).unwrap()
    }

    #[test]
    fn decrements_flush_every_q() {
        let t = Arc::new(super::super::build_q_table(2).unwrap());
        let mut s = SmallSubtreeSum::new(&path(5), &[1, 1, 1, 1, 1], t).unwrap();
        assert_eq!(s.root_sum(), 5);
        s.decrement_weight(4).unwrap();
        assert_eq!((s.flushes(), s.subtree_sum(3), s.subtree_sum(4)), (0, 1, 0));
        s.decrement_weight(2).unwrap();
        assert_eq!((s.flushes(), s.pending()), (1, 0));
        assert_eq!(s.root_sum(), 3);
        assert!(matches!(s.decrement_weight(4), Err(Error::NegativeWeight(4))));
        s.check_invariants().unwrap();
    }

    #[test]
    fn cut_recovers_weights() {
        let t = Arc::new(super::super::build_q_table(4).unwrap());
        let mut s = SmallSubtreeSum::new(&path(6), &[1, 0, 1, 1, 0, 1], t).unwrap();
        s.decrement_weight(3).unwrap();
        s.cut(2).unwrap();
        assert_eq!((s.subtree_sum(0), s.subtree_sum(2), s.subtree_sum(3)), (1, 2, 1));
        assert_eq!(s.weight(3), 0);
        assert!(matches!(s.cut(2), Err(Error::NoParent(2))));
        s.check_invariants().unwrap();
    }

    #[test]
    fn rejects_large_forest() {
        let t = Arc::new(super::super::build_q_table(1).unwrap());
        assert!(matches!(SmallSubtreeSum::new(&path(65), &[0; 65], t), Err(Error::TooLarge { .. })));
    }
}
