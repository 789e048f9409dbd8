use super::decompose::ClusterDecomposition;
use crate::connectivity::DecrementalConnectivity;
use crate::forest::{RootedForest, NONE};

/// A cluster-forest edge, as tree vertex ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClusterEdge {
    pub child: usize,
    pub parent: usize,
}

/// The cluster forest induced by the cuts applied so far.
///
/// Each cluster owns a connectivity structure over its own vertices, so the edge
/// `lb(C) -> ub(C)` disappears exactly when a cut inside `C` separates them.
#[derive(Debug, Clone)]
pub struct InducedClusterForest {
    cluster_of: Vec<u32>,
    local: Vec<u32>,
    tree_parent: Vec<u32>,
    ub: Vec<u32>,
    lb: Vec<u32>,
    conn: Vec<DecrementalConnectivity>,
    lb_linked: Vec<bool>,
    live_parent: Vec<u32>,
}

impl InducedClusterForest {
    pub fn new(t: &RootedForest, d: &ClusterDecomposition) -> Self {
        let n = t.len();
        let mut local = vec![0u32; n];
        let mut conn = Vec::with_capacity(d.len());
        for c in &d.clusters {
            for (i, &v) in c.vertices.iter().enumerate() {
                local[v] = i as u32;
            }
            conn.push(DecrementalConnectivity::new(&t.induced(&c.vertices)));
        }
        let mut live_parent = vec![NONE; n];
        for (i, &v) in d.boundary.iter().enumerate() {
            if let Some(p) = d.cluster_tree.parent(i) {
                live_parent[v] = d.boundary[p] as u32;
            }
        }
        InducedClusterForest {
            cluster_of: d.cluster_of.iter().map(|&c| c as u32).collect(),
            local,
            tree_parent: t.parents().iter().map(|p| p.map_or(NONE, |p| p as u32)).collect(),
            ub: d.clusters.iter().map(|c| c.ub as u32).collect(),
            lb: d.clusters.iter().map(|c| c.lb.map_or(NONE, |x| x as u32)).collect(),
            lb_linked: d.clusters.iter().map(|c| c.lb.is_some_and(|l| l != c.ub)).collect(),
            conn,
            live_parent,
        }
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.cluster_of[v] as usize
    }

    pub fn local(&self, v: usize) -> usize {
        self.local[v] as usize
    }

    pub fn ub(&self, c: usize) -> usize {
        self.ub[c] as usize
    }

    pub fn lb(&self, c: usize) -> Option<usize> {
        let l = self.lb[c];
        (l != NONE).then_some(l as usize)
    }

    /// Applies the cut of `v` from its parent (which must currently exist) and
    /// returns the cluster-forest edge it removes, if any.
    pub fn cut(&mut self, v: usize) -> Option<ClusterEdge> {
        let p = self.tree_parent[v] as usize;
        let c = self.cluster_of(v);
        if self.cluster_of(p) != c {
            self.live_parent[v] = NONE;
            return Some(ClusterEdge { child: v, parent: p });
        }
        let l = self.local(v);
        self.conn[c].cut_unchecked(l);
        if self.lb_linked[c] {
            let lb = self.lb[c] as usize;
            if !self.conn[c].connected_unchecked(0, self.local(lb)) {
                self.lb_linked[c] = false;
                self.live_parent[lb] = NONE;
                return Some(ClusterEdge { child: lb, parent: self.ub(c) });
            }
        }
        None
    }

    /// Connectivity of two vertices of the same cluster.
    #[inline]
    pub fn connected(&self, u: usize, v: usize) -> bool {
        let c = self.cluster_of(u);
        debug_assert_eq!(c, self.cluster_of(v));
        self.conn[c].connected_unchecked(self.local(u), self.local(v))
    }

    /// Current ancestor relation of two vertices of the same cluster.
    #[inline]
    pub fn ancestor(&self, u: usize, v: usize) -> bool {
        let c = self.cluster_of(u);
        debug_assert_eq!(c, self.cluster_of(v));
        self.conn[c].ancestor_unchecked(self.local(u), self.local(v))
    }

    /// Parent of boundary vertex `v` in the induced cluster forest.
    pub fn live_parent(&self, v: usize) -> Option<usize> {
        let p = self.live_parent[v];
        (p != NONE).then_some(p as usize)
    }
}
