//! Helpers shared by the computation-tree tests and the acceptance run: forest
//! enumeration, an independent brute-force MID search, label sequences, operand
//! mutants and the budget-tripling bound check.
#![allow(dead_code)]

use std::collections::HashMap;

use dforest::group::{Instrumented, IntGroup};
use dforest::optimal::{
    evaluate, legal_labels, opt_table_for, AdaptiveTreeSum, ComputationTree, EngineAdapter, GroupStructure, Label,
    Operand, Step, Sym, TraceGroup,
};
use dforest::oracle::{rng, NaiveForest};
use dforest::tree_sum::SimpleTreeSum;
use dforest::RootedForest;
use rand::Rng;

/// Every forest on at most `n` vertices with `parent[v] < v`, with every
/// auxiliary labelling.
pub fn small_forests(n: usize) -> Vec<RootedForest> {
    let mut out = Vec::new();
    for size in 1..=n {
        let mut parents: Vec<Vec<Option<usize>>> = vec![vec![]];
        for v in 0..size {
            parents = parents
                .into_iter()
                .flat_map(|p| {
                    std::iter::once(None).chain((0..v).map(Some)).map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        for p in parents {
            for mask in 0..1u32 << size {
                let aux: Vec<bool> = (0..size).map(|i| mask >> i & 1 == 1).collect();
                out.push(RootedForest::new(&p, &aux).unwrap());
            }
        }
    }
    out
}

/// Independent brute force over syntactic succinct computation trees: at each node
/// it enumerates every instruction list with explicit register indices, running it
/// on an explicit register file over `Z^(n'+m)`.
pub mod syntactic {
    use super::*;

    #[derive(Clone, PartialEq, Eq, Hash)]
    struct Node {
        regs: Vec<Vec<i64>>,
        w: Vec<Vec<i64>>,
        cut: Vec<bool>,
        updates: usize,
        pending: Option<Vec<i64>>,
        depth: usize,
        budget: usize,
        remaining: usize,
    }

    struct Brute<'a> {
        f: &'a RootedForest,
        dim: usize,
        n_real: usize,
        memo: HashMap<Node, bool>,
    }

    fn unit(dim: usize, i: usize) -> Vec<i64> {
        let mut v = vec![0; dim];
        v[i] = 1;
        v
    }

    impl Brute<'_> {
        fn answer(&self, cut: &[bool], w: &[Vec<i64>], v: usize) -> Vec<i64> {
            let root = |mut x: usize| {
                while !cut[x] {
                    match self.f.parent(x) {
                        Some(p) => x = p,
                        None => break,
                    }
                }
                x
            };
            let mut s = vec![0; self.dim];
            for u in 0..self.f.len() {
                if root(u) == root(v) {
                    for i in 0..self.dim {
                        s[i] += w[u][i];
                    }
                }
            }
            s
        }

        fn read(regs: &[Vec<i64>], w: &[Vec<i64>], code: usize) -> Vec<i64> {
            if code < regs.len() {
                regs[code].clone()
            } else {
                w[code - regs.len()].clone()
            }
        }

        /// Tries every instruction list of length `k` at this node.
        fn node_ok(&mut self, s: &Node) -> bool {
            if let Some(&r) = self.memo.get(s) {
                return r;
            }
            let mut ok = false;
            for k in 0..=s.budget {
                if self.lists(s, k, 0, s.regs.clone()) {
                    ok = true;
                    break;
                }
            }
            self.memo.insert(s.clone(), ok);
            ok
        }

        /// Chooses instruction `j` of `k`, with register indices at most `depth + k`.
        fn lists(&mut self, s: &Node, k: usize, j: usize, regs: Vec<Vec<i64>>) -> bool {
            let bound = s.depth + k;
            if j == k {
                return self.after(s, k, regs);
            }
            let n = self.f.len();
            let operands = bound + n;
            for target in 0..bound {
                for x in 0..operands {
                    for y in 0..operands {
                        for sub in [false, true] {
                            let a = Self::read(&regs[..bound], &s.w, x);
                            let b = Self::read(&regs[..bound], &s.w, y);
                            let val: Vec<i64> =
                                a.iter().zip(&b).map(|(p, q)| if sub { p - q } else { p + q }).collect();
                            let mut r2 = regs.clone();
                            r2[target] = val;
                            if self.lists(s, k, j + 1, r2) {
                                return true;
                            }
                        }
                    }
                }
            }
            false
        }

        fn after(&mut self, s: &Node, k: usize, regs: Vec<Vec<i64>>) -> bool {
            let bound = s.depth + k;
            if let Some(p) = &s.pending {
                let found = regs[..bound].contains(p) || s.w.contains(p);
                if !found {
                    return false;
                }
            }
            if s.remaining == 0 {
                return true;
            }
            for l in legal_labels(self.f, &s.cut) {
                let mut c = Node {
                    regs: regs.clone(),
                    w: s.w.clone(),
                    cut: s.cut.clone(),
                    updates: s.updates,
                    pending: None,
                    depth: bound,
                    budget: s.budget - k,
                    remaining: s.remaining - 1,
                };
                match l {
                    Label::Cut(v) => c.cut[v] = true,
                    Label::Update(v) => {
                        c.w[v] = unit(self.dim, self.n_real + c.updates);
                        c.updates += 1;
                    }
                    Label::TreeSum(v) => c.pending = Some(self.answer(&c.cut, &c.w, v)),
                }
                if !self.node_ok(&c) {
                    return false;
                }
            }
            true
        }
    }

    /// Minimum MID over succinct trees with MID at most `d`.
    pub fn min_mid(f: &RootedForest, m: usize, d: usize) -> Option<usize> {
        let n_real = (0..f.len()).filter(|&v| !f.is_aux(v)).count();
        let dim = n_real + m;
        let mut next = 0;
        let w: Vec<Vec<i64>> = (0..f.len())
            .map(|v| {
                if f.is_aux(v) {
                    vec![0; dim]
                } else {
                    next += 1;
                    unit(dim, next - 1)
                }
            })
            .collect();
        let mut b = Brute { f, dim, n_real, memo: HashMap::new() };
        (0..=d).find(|&budget| {
            let root = Node {
                regs: vec![vec![0; dim]; d],
                w: w.clone(),
                cut: vec![false; f.len()],
                updates: 0,
                pending: None,
                depth: 0,
                budget,
                remaining: m,
            };
            b.node_ok(&root)
        })
    }
}
/// All label sequences of length `len` that are legal on `f`.
pub fn sequences(f: &RootedForest, len: usize) -> Vec<Vec<Label>> {
    let mut out = vec![(vec![], vec![false; f.len()])];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|(seq, cut): (Vec<Label>, Vec<bool>)| {
                legal_labels(f, &cut).into_iter().map(move |l| {
                    let mut s = seq.clone();
                    s.push(l);
                    let mut c = cut.clone();
                    if let Label::Cut(v) = l {
                        c[v] = true;
                    }
                    (s, c)
                })
            })
            .collect();
    }
    out.into_iter().map(|(s, _)| s).collect()
}

pub fn steps(seq: &[Label], values: &mut impl FnMut() -> i64) -> Vec<Step<i64>> {
    seq.iter()
        .map(|l| match *l {
            Label::Cut(v) => Step::Cut(v),
            Label::TreeSum(v) => Step::TreeSum(v),
            Label::Update(v) => Step::Update(v, values()),
        })
        .collect()
}

/// Whether two trees produce different outputs on some random integer input.
pub fn differ(a: &ComputationTree, b: &ComputationTree, f: &RootedForest, seed: u64) -> bool {
    let mut r = rng(seed);
    for _ in 0..4 {
        let w: Vec<i64> = (0..f.len()).map(|v| if f.is_aux(v) { 0 } else { r.gen_range(-1000..1000) }).collect();
        for seq in sequences(f, a.height) {
            let sigma = steps(&seq, &mut || r.gen_range(-1000..1000));
            if evaluate(a, &IntGroup, &w, &sigma).unwrap() != evaluate(b, &IntGroup, &w, &sigma).unwrap() {
                return true;
            }
        }
    }
    false
}

pub fn mutants(c: &ComputationTree, n: usize) -> Vec<ComputationTree> {
    let depth = c.instruction_depths();
    let mut out = Vec::new();
    for x in 0..c.nodes.len() {
        let alternatives: Vec<Operand> =
            (1..=depth[x]).map(Operand::Reg).chain((0..n).map(Operand::Weight)).collect();
        for i in 0..c.nodes[x].instructions.len() {
            for side in 0..2 {
                for &alt in &alternatives {
                    let mut m = c.clone();
                    let ins = &mut m.nodes[x].instructions[i];
                    let slot = if side == 0 { &mut ins.x } else { &mut ins.y };
                    if *slot != alt {
                        *slot = alt;
                        out.push(m);
                    }
                }
            }
        }
        if let Some(ret) = c.nodes[x].ret {
            for &alt in alternatives.iter().filter(|&&a| a != ret) {
                let mut m = c.clone();
                m.nodes[x].ret = Some(alt);
                out.push(m);
            }
        }
    }
    out
}

pub fn simple_factory(f: &RootedForest, w: Vec<Sym>, g: TraceGroup) -> Box<dyn GroupStructure<TraceGroup>> {
    Box::new(EngineAdapter(SimpleTreeSum::new(f, w, g)))
}

/// Replays every legal trace of length `1..=m_max` on the 2-path through
/// [`AdaptiveTreeSum`], checking answers against the oracle. Returns the largest
/// ratio of group operations to `OPT + n + m`.
pub fn adaptive_path_ratio(m_max: usize) -> Result<f64, String> {
    let f = RootedForest::new(&[None, Some(0)], &[]).unwrap();
    let table = opt_table_for(&f, m_max).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for m in 1..=m_max {
        for seq in sequences(&f, m) {
            let mut k = 100;
            let sigma = steps(&seq, &mut || {
                k += 1;
                k
            });
            let g = Instrumented::new(IntGroup);
            let mut s = AdaptiveTreeSum::new(&f, vec![5, 7], g.clone(), table.clone());
            let mut naive = NaiveForest::new(&f, vec![5, 7], IntGroup);
            for step in &sigma {
                match step {
                    Step::Cut(v) => {
                        GroupStructure::cut(&mut s, *v);
                        naive.cut(*v).unwrap();
                    }
                    Step::Update(v, x) => {
                        GroupStructure::update_weight(&mut s, *v, *x);
                        naive.update_weight(*v, *x).unwrap();
                    }
                    Step::TreeSum(v) => {
                        let got = GroupStructure::tree_sum(&mut s, *v);
                        if got != naive.tree_sum(*v).unwrap() {
                            return Err(format!("{seq:?}: wrong answer {got}"));
                        }
                    }
                }
            }
            let base = (table.mids[m - 1] + f.len() + m) as f64;
            worst = worst.max(g.counts().total() as f64 / base);
        }
    }
    Ok(worst)
}
