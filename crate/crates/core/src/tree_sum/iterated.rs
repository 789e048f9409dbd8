use std::sync::Arc;

use super::components::PerComponent;
use super::reduction::{ClusterReduction, EngineFactory};
use super::{Legality, SimpleTreeSum, TreeSumEngine};
use crate::clustering::binarize;
use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::group::Group;

/// Number of times `log2` must be applied to `n` to reach a value of at most 1.
pub fn log_star(n: usize) -> usize {
    let mut x = n as f64;
    let mut t = 0;
    while x > 1.0 {
        x = x.log2();
        t += 1;
    }
    t
}

/// `t` nested cluster reductions over a simple structure.
///
/// Level `t` decomposes each tree into clusters of `ceil(log2 n)` vertices and
/// hands every cluster to a level `t - 1` structure; level 1 is [`SimpleTreeSum`].
pub struct IteratedTreeSum<G: Group> {
    inner: PerComponent<G>,
    legal: Legality,
    levels: usize,
}

/// Factory for a level-`t` engine on one tree. `ks[i]` forces the cluster size of
/// the `i`-th reduction counted from the top.
pub fn level_factory<G: Group>(g: G, t: usize, ks: Vec<Option<usize>>) -> EngineFactory<G> {
    let bottom: EngineFactory<G> = {
        let g = g.clone();
        Arc::new(move |f: &RootedForest, w: Vec<G::Elem>| {
            Box::new(SimpleTreeSum::new(f, w, g.clone())) as Box<dyn TreeSumEngine<G> + Send>
        })
    };
    level_factory_over(g, t, ks, bottom)
}

/// As [`level_factory`] with `bottom` as the level-1 engine.
pub fn level_factory_over<G: Group>(g: G, t: usize, ks: Vec<Option<usize>>, bottom: EngineFactory<G>) -> EngineFactory<G> {
    assert!(t >= 1, "level must be positive");
    if t == 1 {
        return bottom;
    }
    let k = ks.first().copied().flatten();
    let child = level_factory_over(g.clone(), t - 1, ks.get(1..).unwrap_or(&[]).to_vec(), bottom);
    Arc::new(move |f: &RootedForest, w: Vec<G::Elem>| {
        let r = ClusterReduction::new(f, w, g.clone(), k, &child).expect("clusters of a binary tree are binary trees");
        Box::new(r) as Box<dyn TreeSumEngine<G> + Send>
    })
}

impl<G: Group> IteratedTreeSum<G> {
    /// `f` must be binary.
    pub fn new(f: &RootedForest, weights: Vec<G::Elem>, g: G, t: usize) -> Result<Self> {
        Self::with_cluster_sizes(f, weights, g, t, Vec::new())
    }

    /// As [`IteratedTreeSum::new`] with forced cluster sizes per level.
    pub fn with_cluster_sizes(
        f: &RootedForest,
        weights: Vec<G::Elem>,
        g: G,
        t: usize,
        ks: Vec<Option<usize>>,
    ) -> Result<Self> {
        if t == 0 {
            return Err(Error::ValueOutOfRange { value: 0, lo: 1, hi: i64::MAX });
        }
        if let Some(v) = (0..f.len()).find(|&v| f.children(v).len() > 2) {
            return Err(Error::NotBinary(v));
        }
        assert_eq!(weights.len(), f.len(), "one weight per vertex");
        let inner = PerComponent::new(f, &weights, &level_factory(g, t, ks));
        Ok(IteratedTreeSum { inner, legal: Legality::new(f.parents(), f.aux_flags()), levels: t })
    }

    /// Binarizes `f` first (original ids are kept) and uses `t` levels, or
    /// `max(1, log* n)` when `t` is `None`.
    pub fn for_forest(f: &RootedForest, weights: Vec<G::Elem>, g: G, t: Option<usize>) -> Result<Self> {
        let t = t.unwrap_or_else(|| log_star(f.len()).max(1));
        let b = binarize(f, &weights, g.zero());
        let mut s = Self::new(&b.forest, b.weights, g, t)?;
        s.legal = Legality::new(f.parents(), f.aux_flags());
        Ok(s)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn tree_sum(&mut self, v: usize) -> Result<G::Elem> {
        self.legal.query(v)?;
        Ok(self.inner.tree_sum(v))
    }

    pub fn update_weight(&mut self, v: usize, x: G::Elem) -> Result<()> {
        self.legal.query(v)?;
        self.inner.update_weight(v, x);
        Ok(())
    }

    pub fn cut_report(&mut self, v: usize) -> Result<(G::Elem, G::Elem)> {
        self.legal.cut(v)?;
        Ok(self.inner.cut_report(v))
    }

    pub fn cut(&mut self, v: usize) -> Result<()> {
        self.cut_report(v).map(|_| ())
    }
}

impl<G: Group> TreeSumEngine<G> for IteratedTreeSum<G> {
    fn tree_sum(&mut self, v: usize) -> G::Elem {
        self.inner.tree_sum(v)
    }
    fn update_weight(&mut self, v: usize, x: G::Elem) {
        self.inner.update_weight(v, x)
    }
    fn cut_report(&mut self, v: usize) -> (G::Elem, G::Elem) {
        self.inner.cut_report(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::IntGroup;

    #[test]
    fn log_star_values() {
        assert_eq!([1, 2, 3, 4, 16, 17, 65536, 65537].map(log_star), [0, 1, 2, 2, 3, 4, 4, 5]);
    }

    #[test]
    fn single_vertex_any_level() {
        let f = RootedForest::new(&[None], &[]).unwrap();
        for t in 1..5 {
            let mut s = IteratedTreeSum::new(&f, vec![9], IntGroup, t).unwrap();
            assert_eq!(s.tree_sum(0).unwrap(), 9);
        }
    }

    #[test]
    fn rejects_non_binary() {
        let f = RootedForest::new(&[None, Some(0), Some(0), Some(0)], &[]).unwrap();
        assert_eq!(IteratedTreeSum::new(&f, vec![1; 4], IntGroup, 2).err(), Some(Error::NotBinary(0)));
        let mut s = IteratedTreeSum::for_forest(&f, vec![1, 2, 3, 4], IntGroup, Some(3)).unwrap();
        assert_eq!(s.cut_report(2).unwrap(), (3, 7));
        assert_eq!(s.tree_sum(3).unwrap(), 7);
    }

    #[test]
    fn isolated_vertex_update() {
        let p: Vec<Option<usize>> = (0..20).map(|v: usize| v.checked_sub(1)).collect();
        let f = RootedForest::new(&p, &[]).unwrap();
        let mut s = IteratedTreeSum::new(&f, vec![1; 20], IntGroup, 3).unwrap();
        s.cut(10).unwrap();
        s.cut(11).unwrap();
        s.update_weight(10, 5).unwrap();
        assert_eq!(s.tree_sum(10).unwrap(), 5);
        assert_eq!(s.tree_sum(0).unwrap(), 10);
        assert_eq!(s.tree_sum(19).unwrap(), 9);
    }
}
