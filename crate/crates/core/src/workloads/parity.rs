//! Prefix parity simulated by subtree sizes.
//!
//! A path `v[0] .. v[n'-1]` rooted at its last vertex; `v[i]` has one unit leaf
//! `u[i][0]` and, when `A[i] = 1`, a second one `u[i][1]`. Every vertex weighs 1,
//! so `ssum(v[k]) = 2(k + 1) + A[0] + .. + A[k]`. Flipping `A[i]` cuts `u[i][0]`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::group::IntGroup;
use crate::oracle::{self, NaiveForest};
use crate::trace::{Op, Trace};

#[derive(Debug, Clone)]
pub struct ParityInstance {
    forest: RootedForest,
    v: Vec<usize>,
    u1: Vec<usize>,
    bits: Vec<bool>,
    flipped: Vec<bool>,
}

pub fn build_parity(bits: &[bool]) -> Result<ParityInstance> {
    let n = bits.len();
    if n == 0 {
        return Err(Error::NotATree);
    }
    let mut parents: Vec<Option<usize>> = (0..n).map(|i| if i + 1 < n { Some(i + 1) } else { None }).collect();
    let mut u1 = Vec::with_capacity(n);
    for (i, &b) in bits.iter().enumerate() {
        u1.push(parents.len());
        parents.push(Some(i));
        if b {
            parents.push(Some(i));
        }
    }
    Ok(ParityInstance {
        forest: RootedForest::new(&parents, &[])?,
        v: (0..n).collect(),
        u1,
        bits: bits.to_vec(),
        flipped: vec![false; n],
    })
}

impl ParityInstance {
    pub fn forest(&self) -> &RootedForest {
        &self.forest
    }

    pub fn weights(&self) -> Vec<i64> {
        vec![1; self.forest.len()]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Vertex whose subtree size encodes the parity of `A[0] + .. + A[k]`.
    pub fn query_vertex(&self, k: usize) -> usize {
        self.v[k]
    }

    pub fn parity(subtree_size: i64) -> bool {
        subtree_size % 2 == 1
    }

    /// Flips `A[i]`, returning the cut that realises it.
    pub fn flip(&mut self, i: usize) -> Result<Op> {
        if i >= self.bits.len() {
            return Err(Error::IndexOutOfRange { index: i, len: self.bits.len() });
        }
        if self.flipped[i] {
            return Err(Error::DoubleFlip(i));
        }
        self.flipped[i] = true;
        self.bits[i] = !self.bits[i];
        Ok(Op::Cut(self.u1[i]))
    }
}

#[derive(Debug, Clone)]
pub struct ParityWorkload {
    pub instance: ParityInstance,
    pub trace: Trace,
    /// Parity each query encodes, from a direct recount of the bits.
    pub expected_parity: Vec<bool>,
}

/// Random bits, then flips of a random subset of positions in random order, each
/// followed by a query of a random prefix.
pub fn parity_workload(n_prime: usize, seed: u64) -> Result<ParityWorkload> {
    use rand::seq::SliceRandom;
    let mut r = oracle::rng(seed);
    let bits: Vec<bool> = (0..n_prime).map(|_| r.gen()).collect();
    let mut inst = build_parity(&bits)?;
    let weights = inst.weights();
    let mut naive = NaiveForest::new(inst.forest(), weights.clone(), IntGroup);
    let mut trace = Trace::new(inst.forest(), weights);
    let mut expected_parity = Vec::new();
    let mut order: Vec<usize> = (0..n_prime).collect();
    order.shuffle(&mut r);
    let flips = r.gen_range(0..=n_prime);
    for &i in &order[..flips] {
        let op = inst.flip(i)?;
        naive.cut(op.vertex())?;
        trace.ops.push(op);
        let k = r.gen_range(0..n_prime);
        let v = inst.query_vertex(k);
        trace.ops.push(Op::SubtreeSum(v, Some(naive.subtree_sum(v)?)));
        expected_parity.push(inst.bits[..=k].iter().filter(|&&b| b).count() % 2 == 1);
    }
    Ok(ParityWorkload { instance: inst, trace, expected_parity })
}
