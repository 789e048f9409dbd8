//! Prefix sums simulated by subtree sums on two weighted spines.
//!
//! `T+` is a path `v+[0] .. v+[n'-1]` rooted at its last vertex; every `v+[i]`
//! carries leaves `u[i][j]` of weight `j` for `j` in `1..=8n'`. `T-` is the same
//! path shape where every `v-[i]` carries `n'` leaves `w[i][p]` of weight 1. Path
//! vertices weigh 0. An update of `A[i]` by `delta` in epoch `p` cuts two leaves of
//! `v+[i]` whose weights add up to `7n' - delta`, and the leaf `w[i][p]`; this
//! keeps
//!
//! ```text
//! A[0] + .. + A[k] = ssum(v+[k]) - 7n' * ssum(v-[k]) + B[k]
//! ```

use rand::Rng;

use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::oracle::{self, NaiveForest};
use crate::group::IntGroup;
use crate::trace::{Op, Trace};

/// Rejection rounds before the sampler falls back to a full scan.
const SAMPLE_ROUNDS: usize = 64;

#[derive(Debug, Clone)]
pub struct SpineInstance {
    n_prime: usize,
    forest: RootedForest,
    weights: Vec<i64>,
    v_plus: Vec<usize>,
    v_minus: Vec<usize>,
    /// `u[i][j - 1]` is the leaf of weight `j` below `v+[i]`.
    u: Vec<Vec<usize>>,
    w: Vec<Vec<usize>>,
    u_live: Vec<Vec<bool>>,
    b: Vec<i64>,
    a: Vec<i64>,
    /// Number of updates already applied to each position.
    updates: Vec<usize>,
    tries: u64,
    samples: u64,
}

/// The three cuts simulating one update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpineCuts {
    pub j1: usize,
    pub j2: usize,
    pub cuts: [usize; 3],
}

impl SpineCuts {
    pub fn ops(&self) -> [Op; 3] {
        self.cuts.map(Op::Cut)
    }
}

pub fn build_spine(n_prime: usize, a: &[i64]) -> Result<SpineInstance> {
    if n_prime == 0 {
        return Err(Error::ValueOutOfRange { value: 0, lo: 1, hi: i64::MAX });
    }
    if a.len() != n_prime {
        return Err(Error::IndexOutOfRange { index: a.len(), len: n_prime });
    }
    let hi = n_prime as i64 - 1;
    if let Some(&x) = a.iter().find(|&&x| !(0..=hi).contains(&x)) {
        return Err(Error::ValueOutOfRange { value: x, lo: 0, hi });
    }
    let np = n_prime;
    let mut parents: Vec<Option<usize>> = Vec::with_capacity(np * (9 * np + 2));
    let mut weights = Vec::with_capacity(parents.capacity());
    let v_plus: Vec<usize> = (0..np).collect();
    let v_minus: Vec<usize> = (np..2 * np).collect();
    for base in [0, np] {
        for i in 0..np {
            parents.push(if i + 1 < np { Some(base + i + 1) } else { None });
            weights.push(0);
        }
    }
    let mut u = vec![Vec::with_capacity(8 * np); np];
    for (i, ui) in u.iter_mut().enumerate() {
        for j in 1..=8 * np {
            ui.push(parents.len());
            parents.push(Some(v_plus[i]));
            weights.push(j as i64);
        }
    }
    let mut w = vec![Vec::with_capacity(np); np];
    for (i, wi) in w.iter_mut().enumerate() {
        for _ in 0..np {
            wi.push(parents.len());
            parents.push(Some(v_minus[i]));
            weights.push(1);
        }
    }
    let forest = RootedForest::new(&parents, &[])?;
    let mut inst = SpineInstance {
        n_prime: np,
        forest,
        weights,
        v_plus,
        v_minus,
        u,
        w,
        u_live: vec![vec![true; 8 * np]; np],
        b: vec![0; np],
        a: a.to_vec(),
        updates: vec![0; np],
        tries: 0,
        samples: 0,
    };
    let mut prefix = 0;
    for (k, &x) in a.iter().enumerate() {
        prefix += x;
        inst.b[k] = prefix - inst.initial_plus_sum(k) + 7 * np as i64 * inst.initial_minus_sum(k);
    }
    Ok(inst)
}

impl SpineInstance {
    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    pub fn forest(&self) -> &RootedForest {
        &self.forest
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn v_plus(&self, k: usize) -> usize {
        self.v_plus[k]
    }

    pub fn v_minus(&self, k: usize) -> usize {
        self.v_minus[k]
    }

    /// Vertex of the leaf of weight `j` below `v+[i]`.
    pub fn u(&self, i: usize, j: usize) -> usize {
        self.u[i][j - 1]
    }

    pub fn w(&self, i: usize, p: usize) -> usize {
        self.w[i][p]
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    pub fn array(&self) -> &[i64] {
        &self.a
    }

    /// Closed form of `ssum(v+[k])` before any cut.
    pub fn initial_plus_sum(&self, k: usize) -> i64 {
        let np = self.n_prime as i64;
        4 * (k as i64 + 1) * np * (8 * np + 1)
    }

    pub fn initial_minus_sum(&self, k: usize) -> i64 {
        (k as i64 + 1) * self.n_prime as i64
    }

    /// Prefix sum `A[0] + .. + A[k]` recovered from the two subtree sums.
    pub fn prefix_sum(&self, k: usize, plus_sum: i64, minus_sum: i64) -> i64 {
        plus_sum - 7 * self.n_prime as i64 * minus_sum + self.b[k]
    }

    /// Mean number of sampled candidates per translated update so far.
    pub fn mean_tries(&self) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.tries as f64 / self.samples as f64
        }
    }

    fn valid(&self, i: usize, j: usize, s: usize) -> bool {
        let np = self.n_prime;
        j >= 1 && j < s && s - j <= 8 * np && j != s - j && self.u_live[i][j - 1] && self.u_live[i][s - j - 1]
    }

    /// Sets `A[i]` to `value` in epoch `p`; position `i` must have been updated in
    /// each of the epochs `0..p` exactly once before.
    pub fn translate_update<R: Rng>(&mut self, p: usize, i: usize, value: i64, rng: &mut R) -> Result<SpineCuts> {
        let np = self.n_prime;
        if i >= np {
            return Err(Error::IndexOutOfRange { index: i, len: np });
        }
        if p >= np {
            return Err(Error::IllegalSequence(format!("epoch {p} beyond the {np} available")));
        }
        if self.updates[i] != p {
            return Err(Error::IllegalSequence(format!(
                "position {i} has {} updates, epoch {p} expects {p}",
                self.updates[i]
            )));
        }
        let hi = np as i64 - 1;
        if !(0..=hi).contains(&value) {
            return Err(Error::ValueOutOfRange { value, lo: 0, hi });
        }
        let delta = value - self.a[i];
        let s = (7 * np as i64 - delta) as usize;
        let mut found = None;
        for _ in 0..SAMPLE_ROUNDS * 3 * np {
            let j = rng.gen_range(1..=3 * np);
            self.tries += 1;
            if self.valid(i, j, s) {
                found = Some(j);
                break;
            }
        }
        if found.is_none() {
            found = (1..=3 * np).find(|&j| self.valid(i, j, s));
        }
        let j1 = found.ok_or_else(|| Error::InvariantBroken(format!("no leaf pair of weight {s} left below v+[{i}]")))?;
        let j2 = s - j1;
        self.samples += 1;
        self.u_live[i][j1 - 1] = false;
        self.u_live[i][j2 - 1] = false;
        self.updates[i] += 1;
        self.a[i] = value;
        Ok(SpineCuts { j1, j2, cuts: [self.u[i][j1 - 1], self.u[i][j2 - 1], self.w[i][p]] })
    }

    /// The same instance with 0-1 weights: a leaf of weight `j` becomes a chain of
    /// `j` unit vertices. Returns the expanded forest, its weights, and the image of
    /// every original vertex (the top of its chain).
    pub fn unit_expansion(&self) -> Result<(RootedForest, Vec<i64>, Vec<usize>)> {
        let n = self.forest.len();
        let mut parents: Vec<Option<usize>> = self.forest.parents().to_vec();
        let mut weights: Vec<i64> = self.weights.iter().map(|&x| x.min(1)).collect();
        for v in 0..n {
            let mut below = v;
            for _ in 1..self.weights[v].max(1) {
                parents.push(Some(below));
                weights.push(1);
                below = parents.len() - 1;
            }
        }
        Ok((RootedForest::new(&parents, &[])?, weights, (0..n).collect()))
    }
}

/// A full spine workload: `n'` epochs, each updating every position once in random
/// order and querying both subtree sums of every prefix.
#[derive(Debug, Clone)]
pub struct SpineWorkload {
    pub instance: SpineInstance,
    pub trace: Trace,
    /// Prefix sums the queries of each epoch encode, in query order.
    pub prefix_sums: Vec<i64>,
}

/// Generates a spine workload from `seed`; with `unit` the trace runs on the unit
/// expansion, otherwise on the weighted spines.
pub fn spine_workload(n_prime: usize, seed: u64, unit: bool) -> Result<SpineWorkload> {
    use rand::seq::SliceRandom;
    let mut r = oracle::rng(seed);
    let a: Vec<i64> = (0..n_prime).map(|_| r.gen_range(0..n_prime as i64)).collect();
    let mut inst = build_spine(n_prime, &a)?;
    let (f, weights, image) = if unit {
        inst.unit_expansion()?
    } else {
        (inst.forest.clone(), inst.weights.clone(), (0..inst.forest.len()).collect())
    };
    let mut naive = NaiveForest::new(&f, weights.clone(), IntGroup);
    let mut trace = Trace::new(&f, weights);
    let mut prefix_sums = Vec::new();
    let mut order: Vec<usize> = (0..n_prime).collect();
    for p in 0..n_prime {
        order.shuffle(&mut r);
        for &i in &order {
            let value = r.gen_range(0..n_prime as i64);
            let cuts = inst.translate_update(p, i, value, &mut r)?;
            for c in cuts.cuts {
                naive.cut(image[c])?;
                trace.ops.push(Op::Cut(image[c]));
            }
        }
        for k in 0..n_prime {
            let plus = naive.subtree_sum(image[inst.v_plus[k]])?;
            let minus = naive.subtree_sum(image[inst.v_minus[k]])?;
            trace.ops.push(Op::SubtreeSum(image[inst.v_plus[k]], Some(plus)));
            trace.ops.push(Op::SubtreeSum(image[inst.v_minus[k]], Some(minus)));
            prefix_sums.push(inst.prefix_sum(k, plus, minus));
        }
    }
    Ok(SpineWorkload { instance: inst, trace, prefix_sums })
}
