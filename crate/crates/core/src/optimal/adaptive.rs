use std::sync::Arc;

use crate::forest::RootedForest;
use crate::group::Group;
use crate::tree_sum::{SimpleTreeSum, TreeSumEngine};

use super::convert::{CtStructure, GroupStructure};
use super::model::{ComputationTree, Step};

/// Optimal computation trees of one forest for `m = 1, 2, ..., cap`.
#[derive(Debug, Clone, Default)]
pub struct OptTable {
    /// `trees[m - 1]` has height `m`; `mids[m - 1]` is its MID.
    pub trees: Vec<Arc<ComputationTree>>,
    pub mids: Vec<usize>,
}

impl OptTable {
    pub fn cap(&self) -> usize {
        self.trees.len()
    }
}

/// Largest `m` in the table with `t(m) = MID_m + n + m <= budget`.
fn pick(table: &OptTable, n: usize, budget: usize) -> Option<usize> {
    (1..=table.cap()).rev().find(|&m| table.mids[m - 1] + n + m <= budget)
}

/// Tree structure for `m_star` operations, or the simple structure for `m_star == 0`.
fn fresh<G: Group>(f: &RootedForest, g: &G, w: &[G::Elem], table: &OptTable, m_star: usize) -> Backend<G> {
    if m_star == 0 {
        return Backend::Simple(SimpleTreeSum::new(f, w.to_vec(), g.clone()));
    }
    Backend::Tree(CtStructure::new(table.trees[m_star - 1].clone(), g.clone(), w.to_vec()))
}

enum Backend<G: Group> {
    Tree(CtStructure<G>),
    Simple(SimpleTreeSum<G>),
}

/// Tree-sum structure for a fixed small forest that does not know the number of
/// operations in advance.
///
/// With budget `t*` (initially `3n`) it runs the table's tree for the largest `m*`
/// with `MID + n + m* <= t*`. When operation `m* + 1` arrives it triples `t*`,
/// picks the new `m*`, rebuilds from the initial weights and replays the logged
/// operations. Past the table it switches to [`SimpleTreeSum`] for good.
pub struct AdaptiveTreeSum<G: Group> {
    forest: RootedForest,
    g: G,
    initial: Vec<G::Elem>,
    table: Arc<OptTable>,
    log: Vec<Step<G::Elem>>,
    budget: usize,
    m_star: usize,
    backend: Backend<G>,
    rebuilds: usize,
    last_replay: usize,
}

impl<G: Group> AdaptiveTreeSum<G> {
    pub fn new(f: &RootedForest, weights: Vec<G::Elem>, g: G, table: Arc<OptTable>) -> Self {
        let budget = 3 * f.len();
        let m_star = pick(&table, f.len(), budget).unwrap_or(1).min(table.cap());
        let backend = fresh(f, &g, &weights, &table, m_star);
        AdaptiveTreeSum {
            forest: f.clone(),
            initial: weights,
            backend,
            g,
            table,
            log: Vec::new(),
            budget,
            m_star,
            rebuilds: 0,
            last_replay: 0,
        }
    }

    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    /// Operations replayed by the most recent rebuild.
    pub fn last_replay(&self) -> usize {
        self.last_replay
    }

    /// Operations the current backend can take in total; `None` after the switch
    /// to the simple structure.
    pub fn m_star(&self) -> Option<usize> {
        (self.m_star > 0).then_some(self.m_star)
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    fn before_op(&mut self) {
        if self.m_star == 0 || self.log.len() < self.m_star {
            return;
        }
        let want = self.log.len() + 1;
        if want > self.table.cap() {
            self.m_star = 0;
        } else {
            loop {
                self.budget *= 3;
                let m = pick(&self.table, self.forest.len(), self.budget).unwrap_or(0);
                if m >= want {
                    self.m_star = m;
                    break;
                }
            }
        }
        self.backend = fresh(&self.forest, &self.g, &self.initial, &self.table, self.m_star);
        self.rebuilds += 1;
        self.last_replay = self.log.len();
        let log = std::mem::take(&mut self.log);
        for step in &log {
            self.apply(step.clone());
        }
        if self.m_star > 0 {
            self.log = log;
        }
    }

    fn apply(&mut self, step: Step<G::Elem>) -> Option<G::Elem> {
        match (&mut self.backend, step) {
            (Backend::Tree(t), Step::TreeSum(v)) => Some(t.tree_sum(v)),
            (Backend::Tree(t), Step::Update(v, x)) => {
                t.update_weight(v, x);
                None
            }
            (Backend::Tree(t), Step::Cut(v)) => {
                GroupStructure::cut(t, v);
                None
            }
            (Backend::Simple(s), Step::TreeSum(v)) => Some(TreeSumEngine::tree_sum(s, v)),
            (Backend::Simple(s), Step::Update(v, x)) => {
                TreeSumEngine::update_weight(s, v, x);
                None
            }
            (Backend::Simple(s), Step::Cut(v)) => {
                TreeSumEngine::cut_report(s, v);
                None
            }
        }
    }

    fn op(&mut self, step: Step<G::Elem>) -> Option<G::Elem> {
        self.before_op();
        if self.m_star > 0 {
            self.log.push(step.clone());
        }
        self.apply(step)
    }
}

impl<G: Group> GroupStructure<G> for AdaptiveTreeSum<G> {
    fn tree_sum(&mut self, v: usize) -> G::Elem {
        self.op(Step::TreeSum(v)).expect("tree-sum returns a value")
    }
    fn update_weight(&mut self, v: usize, x: G::Elem) {
        self.op(Step::Update(v, x));
    }
    fn cut(&mut self, v: usize) {
        self.op(Step::Cut(v));
    }
}

/// `cut_report(v)` runs as a cut followed by tree-sums at `v` and at its former parent.
impl<G: Group> TreeSumEngine<G> for AdaptiveTreeSum<G> {
    fn tree_sum(&mut self, v: usize) -> G::Elem {
        GroupStructure::tree_sum(self, v)
    }
    fn update_weight(&mut self, v: usize, x: G::Elem) {
        GroupStructure::update_weight(self, v, x)
    }
    fn cut_report(&mut self, v: usize) -> (G::Elem, G::Elem) {
        let p = self.forest.parent(v).expect("cut vertex has a parent");
        GroupStructure::cut(self, v);
        let a = GroupStructure::tree_sum(self, v);
        let b = GroupStructure::tree_sum(self, p);
        (a, b)
    }
}
