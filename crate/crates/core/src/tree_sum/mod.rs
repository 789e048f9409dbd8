//! Tree-sum structures: component sums of a weighted forest under cuts and weight
//! updates.

use crate::error::{Error, Result};
use crate::group::Group;

mod components;
mod iterated;
mod reduction;
mod simple;

pub use components::PerComponent;
pub use iterated::{level_factory, level_factory_over, log_star, IteratedTreeSum};
pub use reduction::{default_cluster_size, ClusterReduction, EngineFactory, ReductionStats};
pub use simple::SimpleTreeSum;

/// The operations shared by every tree-sum structure, without legality checks.
///
/// Callers guarantee that `v` is in range, that `update_weight` and `cut_report`
/// never target auxiliary vertices, and that `cut_report(v)` is only issued while
/// `v` has a parent.
pub trait TreeSumEngine<G: Group> {
    fn tree_sum(&mut self, v: usize) -> G::Elem;
    fn update_weight(&mut self, v: usize, x: G::Elem);
    /// Cuts `v` from its parent and returns the sums of the component containing
    /// `v` and of the one containing its former parent.
    fn cut_report(&mut self, v: usize) -> (G::Elem, G::Elem);
}

impl<G: Group> TreeSumEngine<G> for Box<dyn TreeSumEngine<G> + Send> {
    fn tree_sum(&mut self, v: usize) -> G::Elem {
        (**self).tree_sum(v)
    }
    fn update_weight(&mut self, v: usize, x: G::Elem) {
        (**self).update_weight(v, x)
    }
    fn cut_report(&mut self, v: usize) -> (G::Elem, G::Elem) {
        (**self).cut_report(v)
    }
}

/// Legality bookkeeping for checked entry points: auxiliary flags and which
/// vertices still have a parent.
#[derive(Debug, Clone)]
pub struct Legality {
    aux: Vec<bool>,
    has_parent: Vec<bool>,
}

impl Legality {
    pub fn new(parents: &[Option<usize>], aux: &[bool]) -> Self {
        Legality { aux: aux.to_vec(), has_parent: parents.iter().map(Option::is_some).collect() }
    }

    pub fn query(&self, v: usize) -> Result<()> {
        if v >= self.aux.len() {
            return Err(Error::IndexOutOfRange { index: v, len: self.aux.len() });
        }
        if self.aux[v] {
            return Err(Error::AuxiliaryVertex(v));
        }
        Ok(())
    }

    pub fn cut(&mut self, v: usize) -> Result<()> {
        self.query(v)?;
        if !self.has_parent[v] {
            return Err(Error::NoParent(v));
        }
        self.has_parent[v] = false;
        Ok(())
    }
}
