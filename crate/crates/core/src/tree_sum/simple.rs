use super::{Legality, TreeSumEngine};
use crate::connectivity::DecrementalConnectivity;
use crate::error::Result;
use crate::forest::RootedForest;
use crate::group::Group;

/// Component sums stored at the current roots.
///
/// `tree_sum` costs no group operations and `update_weight` exactly two. A cut
/// sums the smaller side found by connectivity and derives the other side with one
/// subtraction from the old total.
#[derive(Debug, Clone)]
pub struct SimpleTreeSum<G: Group> {
    g: G,
    conn: DecrementalConnectivity,
    sums: Vec<G::Elem>,
    w: Vec<G::Elem>,
    legal: Legality,
}

impl<G: Group> SimpleTreeSum<G> {
    /// `weights[v]` for every vertex; auxiliary vertices should carry `zero`.
    pub fn new(f: &RootedForest, weights: Vec<G::Elem>, g: G) -> Self {
        assert_eq!(weights.len(), f.len(), "one weight per vertex");
        let conn = DecrementalConnectivity::new(f);
        let mut sums: Vec<G::Elem> = vec![g.zero(); f.len()];
        let (_, members) = f.components();
        for comp in &members {
            sums[comp[0]] = g.sum(comp.iter().map(|&v| &weights[v]));
        }
        SimpleTreeSum { legal: Legality::new(f.parents(), f.aux_flags()), g, conn, sums, w: weights }
    }

    pub fn group(&self) -> &G {
        &self.g
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn connectivity(&self) -> &DecrementalConnectivity {
        &self.conn
    }

    pub fn weight(&self, v: usize) -> &G::Elem {
        &self.w[v]
    }

    pub fn tree_sum(&mut self, v: usize) -> Result<G::Elem> {
        self.legal.query(v)?;
        Ok(TreeSumEngine::tree_sum(self, v))
    }

    pub fn update_weight(&mut self, v: usize, x: G::Elem) -> Result<()> {
        self.legal.query(v)?;
        TreeSumEngine::update_weight(self, v, x);
        Ok(())
    }

    pub fn cut_report(&mut self, v: usize) -> Result<(G::Elem, G::Elem)> {
        self.legal.cut(v)?;
        Ok(TreeSumEngine::cut_report(self, v))
    }

    pub fn cut(&mut self, v: usize) -> Result<()> {
        self.cut_report(v).map(|_| ())
    }
}

impl<G: Group> TreeSumEngine<G> for SimpleTreeSum<G> {
    fn tree_sum(&mut self, v: usize) -> G::Elem {
        crate::probe::tick(1);
        self.sums[self.conn.root_unchecked(v)].clone()
    }

    fn update_weight(&mut self, v: usize, x: G::Elem) {
        crate::probe::tick(1);
        let r = self.conn.root_unchecked(v);
        let t = self.g.sub(&self.sums[r], &self.w[v]);
        self.sums[r] = self.g.add(&t, &x);
        self.w[v] = x;
    }

    fn cut_report(&mut self, v: usize) -> (G::Elem, G::Elem) {
        let old_root = self.conn.root_unchecked(v);
        let total = self.sums[old_root].clone();
        self.conn.cut_unchecked(v);
        let (side, child_side) = self.conn.last_smaller_side();
        let small = self.g.sum(side.iter().map(|&x| &self.w[x]));
        let large = self.g.sub(&total, &small);
        let (at_v, at_parent) = if child_side { (small, large) } else { (large, small) };
        let p_root = self.conn.root_unchecked(old_root);
        self.sums[v] = at_v.clone();
        self.sums[p_root] = at_parent.clone();
        (at_v, at_parent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::group::{Instrumented, IntGroup, OpCounts};

    fn path3() -> SimpleTreeSum<Instrumented<IntGroup>> {
        let f = RootedForest::new(&[None, Some(0), Some(1)], &[]).unwrap();
        SimpleTreeSum::new(&f, vec![5, 3, 2], Instrumented::new(IntGroup))
    }

    #[test]
    fn sums_and_cuts() {
        let mut s = path3();
        assert_eq!(s.tree_sum(2).unwrap(), 10);
        assert_eq!(s.cut_report(1).unwrap(), (5, 5));
        assert_eq!(s.tree_sum(0).unwrap(), 5);
        assert_eq!(s.tree_sum(2).unwrap(), 5);
        assert_eq!(s.cut_report(1), Err(Error::NoParent(1)));
    }

    #[test]
    fn update_costs_two_ops() {
        let mut s = path3();
        let before = s.group().counts();
        s.update_weight(1, 7).unwrap();
        assert_eq!(s.group().counts() - before, OpCounts { adds: 1, subs: 1 });
        let before = s.group().counts();
        assert_eq!(s.tree_sum(0).unwrap(), 14);
        assert_eq!(s.group().counts(), before);
        s.update_weight(1, 7).unwrap();
        assert_eq!(s.tree_sum(2).unwrap(), 14);
    }

    #[test]
    fn star_cut_report() {
        let f = RootedForest::new(&[None, Some(0), Some(0), Some(0)], &[]).unwrap();
        let mut s = SimpleTreeSum::new(&f, vec![1; 4], IntGroup);
        assert_eq!(s.cut_report(3).unwrap(), (1, 3));
    }

    #[test]
    fn zero_weights() {
        let f = RootedForest::new(&[None, Some(0)], &[]).unwrap();
        let mut s = SimpleTreeSum::new(&f, vec![0, 0], IntGroup);
        assert_eq!(s.tree_sum(1).unwrap(), 0);
    }

    #[test]
    fn aux_rejected() {
        let f = RootedForest::new(&[None, Some(0)], &[false, true]).unwrap();
        let mut s = SimpleTreeSum::new(&f, vec![4, 0], IntGroup);
        assert_eq!(s.tree_sum(1), Err(Error::AuxiliaryVertex(1)));
        assert_eq!(s.update_weight(1, 3), Err(Error::AuxiliaryVertex(1)));
        assert_eq!(s.cut(1), Err(Error::AuxiliaryVertex(1)));
    }
}
