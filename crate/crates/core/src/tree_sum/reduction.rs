use std::sync::Arc;

use super::{SimpleTreeSum, TreeSumEngine};
use crate::clustering::{decompose, ClusterDecomposition, InducedClusterForest};
use crate::error::Result;
use crate::forest::RootedForest;
use crate::group::Group;

/// Builds a child structure for one cluster: the cluster's induced tree with local
/// ids and its weights.
pub type EngineFactory<G> =
    Arc<dyn Fn(&RootedForest, Vec<<G as Group>::Elem>) -> Box<dyn TreeSumEngine<G> + Send> + Send + Sync>;

/// Delegation counters of a [`ClusterReduction`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReductionStats {
    /// Operations received from the caller.
    pub ops: u64,
    /// Operations issued to cluster structures.
    pub x_calls: u64,
    /// Cuts issued to the cluster-forest structure.
    pub d_cuts: u64,
}

/// `max(1, ceil(log2 n))`.
pub fn default_cluster_size(n: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < n {
        k += 1;
    }
    k.max(1)
}

/// One cluster-decomposition level over a single binary tree.
///
/// A simple structure `D` holds the induced cluster forest weighted by `w'`: the
/// upper boundary of a cluster carries the weight of the cluster vertices connected
/// to it, the lower boundary the weight connected to it but not to the upper one.
/// Every operation is answered by `D` or by exactly one cluster structure.
pub struct ClusterReduction<G: Group> {
    g: G,
    icf: InducedClusterForest,
    decomposition: ClusterDecomposition,
    parent: Vec<Option<usize>>,
    d: SimpleTreeSum<G>,
    w_prime: Vec<G::Elem>,
    w: Vec<G::Elem>,
    x: Vec<Box<dyn TreeSumEngine<G> + Send>>,
    stats: ReductionStats,
}

impl<G: Group> ClusterReduction<G> {
    /// `t` must be a binary tree. `k` defaults to [`default_cluster_size`].
    pub fn new(t: &RootedForest, weights: Vec<G::Elem>, g: G, k: Option<usize>, child: &EngineFactory<G>) -> Result<Self> {
        let k = k.unwrap_or_else(|| default_cluster_size(t.len()));
        let decomposition = decompose(t, k)?;
        let icf = InducedClusterForest::new(t, &decomposition);
        let s = decomposition.boundary.len();
        let mut w_prime = vec![g.zero(); s];
        let mut x = Vec::with_capacity(decomposition.len());
        for c in &decomposition.clusters {
            let cw: Vec<G::Elem> = c.vertices.iter().map(|&v| weights[v].clone()).collect();
            let ub = decomposition.boundary_index(c.ub).expect("ub is a boundary vertex");
            w_prime[ub] = g.sum(cw.iter());
            x.push(child(&t.induced(&c.vertices), cw));
        }
        let d = SimpleTreeSum::new(&decomposition.cluster_tree, w_prime.clone(), g.clone());
        Ok(ClusterReduction {
            g,
            icf,
            parent: t.parents().to_vec(),
            decomposition,
            d,
            w_prime,
            w: weights,
            x,
            stats: ReductionStats::default(),
        })
    }

    pub fn stats(&self) -> ReductionStats {
        self.stats
    }

    pub fn decomposition(&self) -> &ClusterDecomposition {
        &self.decomposition
    }

    /// The cluster-forest structure.
    pub fn d(&self) -> &SimpleTreeSum<G> {
        &self.d
    }

    /// Current `w'` of boundary vertex `v`.
    pub fn w_prime(&self, v: usize) -> Option<&G::Elem> {
        self.decomposition.boundary_index(v).map(|i| &self.w_prime[i])
    }

    fn s(&self, v: usize) -> usize {
        self.decomposition.boundary_index(v).expect("boundary vertex")
    }

    fn set_w_prime(&mut self, v: usize, x: G::Elem) {
        let i = self.s(v);
        self.w_prime[i] = x.clone();
        self.d.engine_update(i, x);
    }

    fn d_sum(&mut self, b: usize) -> G::Elem {
        let i = self.s(b);
        TreeSumEngine::tree_sum(&mut self.d, i)
    }

    /// The boundary vertex of `v`'s cluster connected to `v`, preferring the upper one.
    fn boundary_of(&self, v: usize) -> Option<usize> {
        let c = self.icf.cluster_of(v);
        let ub = self.icf.ub(c);
        if self.icf.connected(v, ub) {
            return Some(ub);
        }
        self.icf.lb(c).filter(|&lb| self.icf.connected(v, lb))
    }

    fn x_call(&mut self, v: usize) -> (usize, usize) {
        self.stats.x_calls += 1;
        (self.icf.cluster_of(v), self.icf.local(v))
    }
}

impl<G: Group> SimpleTreeSum<G> {
    fn engine_update(&mut self, v: usize, x: G::Elem) {
        TreeSumEngine::update_weight(self, v, x)
    }
}

impl<G: Group> TreeSumEngine<G> for ClusterReduction<G> {
    fn tree_sum(&mut self, v: usize) -> G::Elem {
        self.stats.ops += 1;
        crate::probe::tick(1);
        match self.boundary_of(v) {
            Some(b) => self.d_sum(b),
            None => {
                let (c, l) = self.x_call(v);
                self.x[c].tree_sum(l)
            }
        }
    }

    fn update_weight(&mut self, v: usize, x: G::Elem) {
        self.stats.ops += 1;
        crate::probe::tick(1);
        let (c, l) = self.x_call(v);
        self.x[c].update_weight(l, x.clone());
        if let Some(b) = self.boundary_of(v) {
            let i = self.s(b);
            let t = self.g.sub(&self.w_prime[i], &self.w[v]);
            let nw = self.g.add(&t, &x);
            self.set_w_prime(b, nw);
        }
        self.w[v] = x;
    }

    fn cut_report(&mut self, v: usize) -> (G::Elem, G::Elem) {
        self.stats.ops += 1;
        crate::probe::tick(1);
        let u = self.parent[v].expect("cut vertex has a parent");
        let c = self.icf.cluster_of(v);
        if self.icf.cluster_of(u) != c {
            self.icf.cut(v);
            self.stats.d_cuts += 1;
            let i = self.s(v);
            return TreeSumEngine::cut_report(&mut self.d, i);
        }
        if let Some(edge) = self.icf.cut(v) {
            self.stats.d_cuts += 1;
            let i = self.s(edge.child);
            TreeSumEngine::cut_report(&mut self.d, i);
        }
        let (_, l) = self.x_call(v);
        let (x_v, x_u) = self.x[c].cut_report(l);
        let ub = self.icf.ub(c);
        let lb = self.icf.lb(c);
        if self.icf.connected(u, ub) {
            self.set_w_prime(ub, x_u.clone());
            if let Some(lb) = lb.filter(|&lb| self.icf.connected(lb, v)) {
                self.set_w_prime(lb, x_v.clone());
            }
        } else if let Some(lb) = lb {
            if self.icf.connected(u, lb) {
                self.set_w_prime(lb, x_u.clone());
            } else if self.icf.connected(v, lb) {
                self.set_w_prime(lb, x_v.clone());
            }
        }
        let at_v = match self.boundary_of(v) {
            Some(b) => self.d_sum(b),
            None => x_v,
        };
        let at_u = match self.boundary_of(u) {
            Some(b) => self.d_sum(b),
            None => x_u,
        };
        (at_v, at_u)
    }
}
