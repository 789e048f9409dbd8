use std::sync::Arc;

use crate::clustering::{decompose, ClusterDecomposition};
use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::probe;

use super::packed::QTable;
use super::small::{SmallSubtreeSum, SMALL_MAX};

/// Subtree sums on a tree of at most `ℓ^t` vertices with non-negative weights.
///
/// Level 1 is a [`SmallSubtreeSum`]. Level `t` splits the tree into clusters of at
/// most `⌈n/ℓ⌉` vertices, keeps a small structure `D` over the cluster tree and one
/// level `t - 1` structure `X_C` per cluster on `C \ {lb}`. In `D`, an upper
/// boundary carries the weight of the part of `C \ {lb}` still attached to it and a
/// lower boundary carries its own weight.
#[derive(Debug, Clone)]
pub struct RecursiveSubtreeSum {
    node: Node,
}

#[derive(Debug, Clone)]
enum Node {
    Small(SmallSubtreeSum),
    Level(Box<Level>),
}

#[derive(Debug, Clone)]
struct Level {
    tree: RootedForest,
    dec: ClusterDecomposition,
    d: SmallSubtreeSum,
    x: Vec<Option<RecursiveSubtreeSum>>,
    /// Index of each non-`lb` vertex inside its cluster's `X_C`.
    local: Vec<u32>,
    depth: Vec<u32>,
    /// Per cluster, one plus the depth of the deepest cut on the `ub`..`lb` path,
    /// or zero while that path is intact.
    path_cut: Vec<u32>,
    /// Per cluster, the `D` weight of `ub`.
    w_ub: Vec<i64>,
    d_decrements: u64,
}

impl RecursiveSubtreeSum {
    /// `tree` must be a single binary tree of at most `ell^t` vertices.
    pub fn new(tree: &RootedForest, weights: &[i64], ell: usize, t: usize, table: &Arc<QTable>) -> Result<Self> {
        let n = tree.len();
        if ell < 2 {
            return Err(Error::ValueOutOfRange { value: ell as i64, lo: 2, hi: 64 });
        }
        let cap = (ell as u128).checked_pow(t as u32).unwrap_or(u128::MAX);
        if (n as u128) > cap {
            return Err(Error::TooLarge { n, cap: cap.min(usize::MAX as u128) as usize });
        }
        if t <= 1 || n <= ell {
            let small = SmallSubtreeSum::new(tree, weights, table.clone())?;
            return Ok(RecursiveSubtreeSum { node: Node::Small(small) });
        }
        if weights.len() != n {
            return Err(Error::IndexOutOfRange { index: weights.len(), len: n });
        }
        let dec = decompose(tree, n.div_ceil(ell))?;
        if dec.boundary.len() > SMALL_MAX {
            return Err(Error::InvariantBroken(format!("{} boundary vertices", dec.boundary.len())));
        }

        let order = tree.preorder();
        let mut depth = vec![0u32; n];
        for &v in &order {
            if let Some(p) = tree.parent(v) {
                depth[v] = depth[p] + 1;
            }
        }

        let mut local = vec![u32::MAX; n];
        let mut x = Vec::with_capacity(dec.len());
        let mut w_ub = Vec::with_capacity(dec.len());
        for c in &dec.clusters {
            let upper: Vec<usize> = c.vertices.iter().copied().filter(|&v| Some(v) != c.lb).collect();
            w_ub.push(upper.iter().map(|&v| weights[v]).sum::<i64>());
            if upper.is_empty() {
                x.push(None);
                continue;
            }
            for (i, &v) in upper.iter().enumerate() {
                local[v] = i as u32;
            }
            let sub = tree.induced(&upper);
            let w: Vec<i64> = upper.iter().map(|&v| weights[v]).collect();
            x.push(Some(RecursiveSubtreeSum::new(&sub, &w, ell, t - 1, table)?));
        }

        let d_weights: Vec<i64> = dec
            .boundary
            .iter()
            .map(|&b| {
                let c = &dec.clusters[dec.cluster_of[b]];
                if b == c.ub && c.lb != Some(b) {
                    w_ub[c.id]
                } else {
                    weights[b]
                }
            })
            .collect();
        let d = SmallSubtreeSum::new(&dec.cluster_tree, &d_weights, table.clone())?;
        let path_cut = vec![0; dec.len()];
        let level = Level { tree: tree.clone(), dec, d, x, local, depth, path_cut, w_ub, d_decrements: 0 };
        Ok(RecursiveSubtreeSum { node: Node::Level(Box::new(level)) })
    }

    /// Number of recursion levels below and including this one.
    pub fn levels(&self) -> usize {
        match &self.node {
            Node::Small(_) => 1,
            Node::Level(l) => 1 + l.x.iter().flatten().map(|x| x.levels()).max().unwrap_or(0),
        }
    }

    /// Weight decrements issued to the `D` structures of all levels.
    pub fn d_decrements(&self) -> u64 {
        match &self.node {
            Node::Small(_) => 0,
            Node::Level(l) => l.d_decrements + l.x.iter().flatten().map(|x| x.d_decrements()).sum::<u64>(),
        }
    }

    pub fn subtree_sum(&self, v: usize) -> i64 {
        match &self.node {
            Node::Small(s) => s.subtree_sum(v),
            Node::Level(l) => l.subtree_sum(v),
        }
    }

    /// Subtree sum of the root the tree had when built.
    pub fn root_sum(&self) -> i64 {
        match &self.node {
            Node::Small(s) => s.root_sum(),
            Node::Level(l) => l.d.root_sum(),
        }
    }

    /// Removes the edge above `v`; the caller guarantees that `v` has a parent.
    pub fn cut(&mut self, v: usize) -> Result<()> {
        match &mut self.node {
            Node::Small(s) => s.cut(v),
            Node::Level(l) => l.cut(v),
        }
    }
}

impl Level {
    fn d_index(&self, v: usize) -> usize {
        self.dec.boundary_index(v).expect("boundary vertex")
    }

    fn on_path_to_lb(&self, v: usize, lb: usize) -> bool {
        let t = &self.tree;
        t.pre(v) <= t.pre(lb) && t.post(lb) <= t.post(v)
    }

    fn subtree_sum(&self, v: usize) -> i64 {
        probe::tick(1);
        if let Some(b) = self.dec.boundary_index(v) {
            return self.d.subtree_sum(b);
        }
        let c = &self.dec.clusters[self.dec.cluster_of[v]];
        let inner = self.x[c.id].as_ref().expect("non-boundary vertex lies in some X_C");
        let s = inner.subtree_sum(self.local[v] as usize);
        match c.lb {
            Some(lb) if self.on_path_to_lb(v, lb) && self.path_cut[c.id] <= self.depth[v] + 1 => {
                s + self.d.subtree_sum(self.d_index(lb))
            }
            _ => s,
        }
    }

    fn cut(&mut self, v: usize) -> Result<()> {
        probe::tick(1);
        let cid = self.dec.cluster_of[v];
        let (ub, lb) = (self.dec.clusters[cid].ub, self.dec.clusters[cid].lb);
        if v == ub {
            return self.d.cut(self.d_index(v));
        }
        if let Some(lb) = lb {
            if self.on_path_to_lb(v, lb) {
                if self.path_cut[cid] == 0 {
                    self.d.cut(self.d_index(lb))?;
                }
                self.path_cut[cid] = self.path_cut[cid].max(self.depth[v] + 1);
            }
            if v == lb {
                return Ok(());
            }
        }
        let inner = self.x[cid].as_mut().expect("cut vertex lies in some X_C");
        inner.cut(self.local[v] as usize)?;
        let attached = inner.root_sum();
        let b = self.d_index(ub);
        while self.w_ub[cid] > attached {
            self.d.decrement_weight(b)?;
            self.w_ub[cid] -= 1;
            self.d_decrements += 1;
        }
        Ok(())
    }
}
