//! Reference answers by brute force, and seeded generators for forests and traces.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`, so any instance is
//! reproducible from its seed alone.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::group::{Group, IntGroup};
use crate::trace::{ForestStructure, Op, OpKind, Trace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A forest answering every query by traversal.
#[derive(Debug, Clone)]
pub struct NaiveForest<G: Group> {
    g: G,
    parent: Vec<Option<usize>>,
    aux: Vec<bool>,
    w: Vec<G::Elem>,
}

impl<G: Group> NaiveForest<G> {
    pub fn new(f: &RootedForest, weights: Vec<G::Elem>, g: G) -> Self {
        assert_eq!(weights.len(), f.len(), "one weight per vertex");
        NaiveForest { g, parent: f.parents().to_vec(), aux: f.aux_flags().to_vec(), w: weights }
    }

    fn legal(&self, v: usize) -> Result<()> {
        if v >= self.w.len() {
            return Err(Error::IndexOutOfRange { index: v, len: self.w.len() });
        }
        if self.aux[v] {
            return Err(Error::AuxiliaryVertex(v));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn root(&self, mut v: usize) -> usize {
        while let Some(p) = self.parent[v] {
            v = p;
        }
        v
    }

    pub fn connected(&self, u: usize, v: usize) -> bool {
        self.root(u) == self.root(v)
    }

    /// Reflexive ancestor test in the current forest.
    pub fn ancestor(&self, u: usize, v: usize) -> bool {
        let mut x = Some(v);
        while let Some(y) = x {
            if y == u {
                return true;
            }
            x = self.parent[y];
        }
        false
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn tree_sum(&self, v: usize) -> Result<G::Elem> {
        self.legal(v)?;
        let r = self.root(v);
        Ok(self.sum_where(|x| self.root(x) == r))
    }

    pub fn subtree_sum(&self, v: usize) -> Result<G::Elem> {
        self.legal(v)?;
        Ok(self.sum_where(|x| self.ancestor(v, x)))
    }

    fn sum_where(&self, keep: impl Fn(usize) -> bool) -> G::Elem {
        (0..self.w.len()).filter(|&x| keep(x)).fold(self.g.zero(), |acc, x| self.g.add(&acc, &self.w[x]))
    }

    pub fn update_weight(&mut self, v: usize, x: G::Elem) -> Result<()> {
        self.legal(v)?;
        self.w[v] = x;
        Ok(())
    }

    pub fn cut(&mut self, v: usize) -> Result<()> {
        self.legal(v)?;
        if self.parent[v].take().is_none() {
            return Err(Error::NoParent(v));
        }
        Ok(())
    }

    pub fn weight(&self, v: usize) -> &G::Elem {
        &self.w[v]
    }
}

impl ForestStructure for NaiveForest<IntGroup> {
    fn supports(&self, _: OpKind) -> bool {
        true
    }
    fn tree_sum(&mut self, v: usize) -> Result<i64> {
        NaiveForest::tree_sum(self, v)
    }
    fn subtree_sum(&mut self, v: usize) -> Result<i64> {
        NaiveForest::subtree_sum(self, v)
    }
    fn update_weight(&mut self, v: usize, x: i64) -> Result<()> {
        NaiveForest::update_weight(self, v, x)
    }
    fn cut(&mut self, v: usize) -> Result<()> {
        NaiveForest::cut(self, v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    UniformAttachment,
    Path,
    Star,
    Caterpillar,
    /// Heap-ordered complete binary tree.
    Balanced,
    /// Uniform attachment where each vertex starts a new tree with probability 1/8.
    Forest,
}

impl Shape {
    pub const ALL: [Shape; 6] =
        [Shape::UniformAttachment, Shape::Path, Shape::Star, Shape::Caterpillar, Shape::Balanced, Shape::Forest];

    pub fn name(&self) -> &'static str {
        match self {
            Shape::UniformAttachment => "uniform",
            Shape::Path => "path",
            Shape::Star => "star",
            Shape::Caterpillar => "caterpillar",
            Shape::Balanced => "balanced",
            Shape::Forest => "forest",
        }
    }
}

impl FromStr for Shape {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Shape::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| format!("unknown shape `{s}`"))
    }
}

/// A forest on `n >= 1` vertices where every parent id is smaller than its child's.
pub fn gen_random_tree(n: usize, seed: u64, shape: Shape) -> RootedForest {
    assert!(n >= 1, "at least one vertex");
    let mut r = rng(seed);
    let spine = n.div_ceil(2);
    let parents: Vec<Option<usize>> = (0..n)
        .map(|v| {
            if v == 0 {
                return None;
            }
            match shape {
                Shape::UniformAttachment => Some(r.gen_range(0..v)),
                Shape::Path => Some(v - 1),
                Shape::Star => Some(0),
                Shape::Caterpillar if v < spine => Some(v - 1),
                Shape::Caterpillar => Some(r.gen_range(0..spine)),
                Shape::Balanced => Some((v - 1) / 2),
                Shape::Forest => (!r.gen_ratio(1, 8)).then(|| r.gen_range(0..v)),
            }
        })
        .collect();
    RootedForest::new(&parents, &[]).expect("parents precede children")
}

/// Marks each vertex auxiliary with probability `p` (auxiliary weights are zeroed).
pub fn with_random_aux(f: &RootedForest, weights: &mut [i64], p: f64, seed: u64) -> RootedForest {
    let mut r = rng(seed);
    let aux: Vec<bool> = (0..f.len()).map(|_| r.gen_bool(p)).collect();
    for (w, &a) in weights.iter_mut().zip(&aux) {
        if a {
            *w = 0;
        }
    }
    RootedForest::new(f.parents(), &aux).expect("same parent relation")
}

pub fn random_weights(n: usize, lo: i64, hi: i64, seed: u64) -> Vec<i64> {
    let mut r = rng(seed);
    (0..n).map(|_| r.gen_range(lo..=hi)).collect()
}

/// Relative frequencies of the operation kinds and the range of update values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpMix {
    pub cut: u32,
    pub update: u32,
    pub tree_sum: u32,
    pub subtree_sum: u32,
    pub weight_lo: i64,
    pub weight_hi: i64,
}

impl OpMix {
    pub const TREE_SUM: OpMix = OpMix { cut: 1, update: 1, tree_sum: 2, subtree_sum: 0, weight_lo: -1000, weight_hi: 1000 };
    pub const TREE_SIZE: OpMix = OpMix { cut: 1, update: 1, tree_sum: 2, subtree_sum: 0, weight_lo: 0, weight_hi: 1 };
    pub const SUBTREE_SIZE: OpMix = OpMix { cut: 1, update: 0, tree_sum: 0, subtree_sum: 2, weight_lo: 0, weight_hi: 1 };
    pub const ALL: OpMix = OpMix { cut: 1, update: 1, tree_sum: 1, subtree_sum: 1, weight_lo: -1000, weight_hi: 1000 };
    pub const CUT_ONLY: OpMix = OpMix { cut: 1, update: 0, tree_sum: 0, subtree_sum: 0, weight_lo: 0, weight_hi: 0 };
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedTrace {
    pub trace: Trace,
    /// Set when no legal operation of the mix remained before `m` were generated.
    pub exhausted: bool,
}

/// A legal trace of up to `m` operations with expected answers from [`NaiveForest`].
pub fn gen_random_trace(f: &RootedForest, weights: &[i64], m: usize, mix: &OpMix, seed: u64) -> GeneratedTrace {
    let mut r = rng(seed);
    let mut trace = Trace::new(f, weights.to_vec());
    let mut naive = NaiveForest::new(f, weights.to_vec(), IntGroup);
    let open: Vec<usize> = (0..f.len()).filter(|&v| !f.is_aux(v)).collect();
    let mut cuttable: Vec<usize> = open.iter().copied().filter(|&v| f.parent(v).is_some()).collect();
    cuttable.shuffle(&mut r);
    let mut exhausted = false;
    while trace.ops.len() < m {
        let kinds = [
            (OpKind::Cut, if cuttable.is_empty() { 0 } else { mix.cut }),
            (OpKind::Update, if open.is_empty() { 0 } else { mix.update }),
            (OpKind::TreeSum, if open.is_empty() { 0 } else { mix.tree_sum }),
            (OpKind::SubtreeSum, if open.is_empty() { 0 } else { mix.subtree_sum }),
        ];
        let total: u32 = kinds.iter().map(|k| k.1).sum();
        if total == 0 {
            exhausted = true;
            break;
        }
        let mut pick = r.gen_range(0..total);
        let kind = kinds
            .iter()
            .find(|k| {
                if pick < k.1 {
                    true
                } else {
                    pick -= k.1;
                    false
                }
            })
            .expect("pick below total")
            .0;
        let op = match kind {
            OpKind::Cut => {
                let v = cuttable.swap_remove(r.gen_range(0..cuttable.len()));
                naive.cut(v).expect("generated cut is legal");
                Op::Cut(v)
            }
            OpKind::Update => {
                let v = open[r.gen_range(0..open.len())];
                let x = r.gen_range(mix.weight_lo..=mix.weight_hi);
                naive.update_weight(v, x).expect("generated update is legal");
                Op::Update(v, x)
            }
            OpKind::TreeSum => {
                let v = open[r.gen_range(0..open.len())];
                Op::TreeSum(v, Some(naive.tree_sum(v).expect("legal query")))
            }
            OpKind::SubtreeSum => {
                let v = open[r.gen_range(0..open.len())];
                Op::SubtreeSum(v, Some(naive.subtree_sum(v).expect("legal query")))
            }
        };
        trace.ops.push(op);
    }
    GeneratedTrace { trace, exhausted }
}

/// A full random instance: shape, weights in `mix`'s range, and a trace.
pub fn gen_instance(n: usize, m: usize, shape: Shape, mix: &OpMix, seed: u64) -> GeneratedTrace {
    let f = gen_random_tree(n, seed, shape);
    let w = random_weights(n, mix.weight_lo, mix.weight_hi, seed ^ 0x9e37_79b9_7f4a_7c15);
    gen_random_trace(&f, &w, m, mix, seed.wrapping_add(1))
}
