//! Structures by name, behind the integer [`ForestStructure`] interface used by
//! trace replay, fuzzing and benchmarks.
//!
//! Names: `simple`, `iterated:<t>`, `linear01`, `subtree`, `universal`, `oracle`
//! and `fixture-offbyone`, a deliberately broken structure for harness tests.

use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::group::{Instrumented, IntGroup, OpCounts};
use crate::optimal::UniversalTreeSum;
use crate::oracle::{NaiveForest, OpMix};
use crate::subtree::SubtreeSize;
use crate::trace::{ForestStructure, OpKind};
use crate::tree_size::LinearTreeSize;
use crate::tree_sum::{IteratedTreeSum, Legality, SimpleTreeSum, TreeSumEngine};

pub const NAMES: [&str; 7] = ["simple", "iterated:<t>", "linear01", "subtree", "universal", "oracle", "fixture-offbyone"];

/// Tree-sum structure over instrumented integers.
pub struct GroupTreeSum {
    g: Instrumented<IntGroup>,
    engine: Box<dyn TreeSumEngine<Instrumented<IntGroup>> + Send>,
    legal: Legality,
}

impl GroupTreeSum {
    pub fn new(
        f: &RootedForest,
        g: Instrumented<IntGroup>,
        engine: Box<dyn TreeSumEngine<Instrumented<IntGroup>> + Send>,
    ) -> Self {
        GroupTreeSum { g, engine, legal: Legality::new(f.parents(), f.aux_flags()) }
    }
}

impl ForestStructure for GroupTreeSum {
    fn supports(&self, kind: OpKind) -> bool {
        kind != OpKind::SubtreeSum
    }
    fn tree_sum(&mut self, v: usize) -> Result<i64> {
        self.legal.query(v)?;
        Ok(self.engine.tree_sum(v))
    }
    fn subtree_sum(&mut self, _: usize) -> Result<i64> {
        Err(Error::IllegalOperation { index: 0, reason: "subtree sums unsupported".into() })
    }
    fn update_weight(&mut self, v: usize, x: i64) -> Result<()> {
        self.legal.query(v)?;
        self.engine.update_weight(v, x);
        Ok(())
    }
    fn cut(&mut self, v: usize) -> Result<()> {
        self.legal.cut(v)?;
        self.engine.cut_report(v);
        Ok(())
    }
    fn group_ops(&self) -> OpCounts {
        self.g.counts()
    }
}

/// Naive oracle that drops one vertex from tree sums of components of at least
/// five vertices once a cut has happened.
pub struct OffByOne {
    inner: NaiveForest<IntGroup>,
    cuts: usize,
    n: usize,
}

impl ForestStructure for OffByOne {
    fn supports(&self, _: OpKind) -> bool {
        true
    }
    fn tree_sum(&mut self, v: usize) -> Result<i64> {
        let s = self.inner.tree_sum(v)?;
        let r = self.inner.root(v);
        let size = (0..self.n).filter(|&x| self.inner.root(x) == r).count();
        if self.cuts > 0 && size >= 5 {
            let last = (0..self.n).rev().find(|&x| self.inner.root(x) == r).expect("component is non-empty");
            return Ok(s - self.inner.weight(last));
        }
        Ok(s)
    }
    fn subtree_sum(&mut self, v: usize) -> Result<i64> {
        self.inner.subtree_sum(v)
    }
    fn update_weight(&mut self, v: usize, x: i64) -> Result<()> {
        self.inner.update_weight(v, x)
    }
    fn cut(&mut self, v: usize) -> Result<()> {
        self.cuts += 1;
        self.inner.cut(v)
    }
}

impl ForestStructure for LinearTreeSize {
    fn supports(&self, kind: OpKind) -> bool {
        kind != OpKind::SubtreeSum
    }
    fn tree_sum(&mut self, v: usize) -> Result<i64> {
        LinearTreeSize::tree_sum(self, v)
    }
    fn subtree_sum(&mut self, _: usize) -> Result<i64> {
        Err(Error::IllegalOperation { index: 0, reason: "subtree sums unsupported".into() })
    }
    fn update_weight(&mut self, v: usize, x: i64) -> Result<()> {
        LinearTreeSize::update_weight(self, v, x)
    }
    fn cut(&mut self, v: usize) -> Result<()> {
        LinearTreeSize::cut(self, v)
    }
}

/// Operation mix legal for the structure called `name`: 0-1 weights for the size
/// structures, subtree queries only for `subtree`.
pub fn mix_for(name: &str) -> OpMix {
    match name {
        "linear01" => OpMix::TREE_SIZE,
        "subtree" => OpMix::SUBTREE_SIZE,
        "oracle" | "fixture-offbyone" => OpMix::ALL,
        _ => OpMix::TREE_SUM,
    }
}

fn unknown(name: &str) -> Error {
    Error::IllegalSequence(format!("unknown structure `{name}`; expected one of {}", NAMES.join(", ")))
}

/// Builds the structure called `name` on `(f, weights)`.
pub fn build(name: &str, f: &RootedForest, weights: &[i64]) -> Result<Box<dyn ForestStructure + Send>> {
    let g = Instrumented::new(IntGroup);
    Ok(match name {
        "oracle" => Box::new(NaiveForest::new(f, weights.to_vec(), IntGroup)),
        "fixture-offbyone" => {
            Box::new(OffByOne { inner: NaiveForest::new(f, weights.to_vec(), IntGroup), cuts: 0, n: f.len() })
        }
        "simple" => {
            let s = SimpleTreeSum::new(f, weights.to_vec(), g.clone());
            Box::new(GroupTreeSum::new(f, g, Box::new(s)))
        }
        "linear01" => Box::new(LinearTreeSize::new(f, weights)?),
        "subtree" => Box::new(SubtreeSize::new(f, weights)?),
        "universal" => {
            let s = UniversalTreeSum::new(f, weights.to_vec(), g.clone())?;
            Box::new(GroupTreeSum::new(f, g, Box::new(s)))
        }
        _ if name.starts_with("iterated") => {
            let t = match name.strip_prefix("iterated:") {
                Some(t) => Some(t.parse::<usize>().map_err(|_| unknown(name))?),
                None if name == "iterated" => None,
                None => return Err(unknown(name)),
            };
            let s = IteratedTreeSum::for_forest(f, weights.to_vec(), g.clone(), t)?;
            Box::new(GroupTreeSum::new(f, g, Box::new(s)))
        }
        _ => return Err(unknown(name)),
    })
}
