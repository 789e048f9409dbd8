use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::forest::RootedForest;

use super::check::{expected_answer, BasisWeights};
use super::model::{legal_labels, BinOp, ComputationTree, CtNode, Instruction, Label, Operand};

/// Size limits for [`search_optimal_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCaps {
    pub n: usize,
    pub m: usize,
    pub d: usize,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps { n: 3, m: 2, d: 4 }
    }
}

/// A minimum-MID correct computation tree of height `m` for the forest with the
/// given fingerprint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptResult {
    pub fingerprint: String,
    pub m: usize,
    pub mid: usize,
    pub witness: ComputationTree,
}

/// Canonical key of a forest: the parent sequence (`-` for roots) and the
/// auxiliary flags, e.g. `-,0/01`.
pub fn fingerprint(f: &RootedForest) -> String {
    let parents: Vec<String> = f.parents().iter().map(|p| p.map_or("-".to_string(), |p| p.to_string())).collect();
    let aux: String = f.aux_flags().iter().map(|&a| if a { '1' } else { '0' }).collect();
    format!("{}/{}", parents.join(","), aux)
}

pub fn search_optimal(f: &RootedForest, m: usize, d: usize) -> Result<OptResult> {
    search_optimal_with(f, m, d, SearchCaps::default())
}

/// Finds a correct computation tree of height `m` whose MID is minimum, provided
/// that minimum is at most `d`.
///
/// The search runs over semantic states: a register holds an integer vector in
/// `Z^(n'+m)`, every instruction writes a fresh register, and states with the same
/// set of register values are merged. Budgets are tried in increasing order.
pub fn search_optimal_with(f: &RootedForest, m: usize, d: usize, caps: SearchCaps) -> Result<OptResult> {
    if f.len() > caps.n || m > caps.m || d > caps.d {
        return Err(Error::CapExceeded(format!(
            "search for n={}, m={m}, d={d} exceeds caps n<={}, m<={}, d<={}",
            f.len(),
            caps.n,
            caps.m,
            caps.d
        )));
    }
    let basis = BasisWeights::new(f, m);
    let mut s = Searcher { f, basis, memo: HashMap::new() };
    for budget in 0..=d {
        let root = s.root(budget, m);
        if s.solve(&root) {
            let mut c = ComputationTree { height: m, nodes: vec![CtNode::default()] };
            s.build(root, &mut c, 0);
            debug_assert_eq!(c.mid(), budget);
            return Ok(OptResult { fingerprint: fingerprint(f), m, mid: budget, witness: c });
        }
    }
    Err(Error::Infeasible(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Ctx {
    cut: Vec<bool>,
    w: Vec<Vec<i64>>,
    updates: usize,
    /// Register values in write order; register `i + 1` holds `regs[i]`.
    regs: Vec<Vec<i64>>,
    pending: Option<Vec<i64>>,
    budget: usize,
    remaining: usize,
}

type Key = (Vec<bool>, Vec<Vec<i64>>, Vec<Vec<i64>>, Option<Vec<i64>>, usize, usize);

#[derive(Debug, Clone, Copy)]
enum Src {
    Reg(usize),
    Weight(usize),
    Zero,
}

struct Candidate {
    value: Vec<i64>,
    op: BinOp,
    x: Src,
    y: Src,
}

struct Searcher<'a> {
    f: &'a RootedForest,
    basis: BasisWeights,
    memo: HashMap<Key, bool>,
}

impl Searcher<'_> {
    fn root(&self, budget: usize, m: usize) -> Ctx {
        Ctx {
            cut: vec![false; self.f.len()],
            w: self.basis.initial.clone(),
            updates: 0,
            regs: Vec::new(),
            pending: None,
            budget,
            remaining: m,
        }
    }

    fn key(ctx: &Ctx) -> Key {
        let mut regs = ctx.regs.clone();
        regs.sort_unstable();
        // the update count is implied by the weights
        (ctx.cut.clone(), ctx.w.clone(), regs, ctx.pending.clone(), ctx.budget, ctx.remaining)
    }

    fn pending_ok(ctx: &Ctx) -> bool {
        match &ctx.pending {
            None => true,
            Some(p) => ctx.regs.contains(p) || ctx.w.contains(p),
        }
    }

    fn child(&self, ctx: &Ctx, label: Label) -> Ctx {
        let mut c = ctx.clone();
        c.remaining -= 1;
        c.pending = None;
        match label {
            Label::Cut(v) => c.cut[v] = true,
            Label::Update(v) => {
                c.w[v] = self.basis.update_value(c.updates);
                c.updates += 1;
            }
            Label::TreeSum(v) => c.pending = Some(expected_answer(self.f, &c.cut, &c.w, v)),
        }
        c
    }

    fn children_ok(&mut self, ctx: &Ctx) -> bool {
        if ctx.remaining == 0 {
            return true;
        }
        legal_labels(self.f, &ctx.cut).into_iter().all(|l| {
            let c = self.child(ctx, l);
            self.solve(&c)
        })
    }

    fn ok_here(&mut self, ctx: &Ctx) -> bool {
        Self::pending_ok(ctx) && self.children_ok(ctx)
    }

    fn candidates(&self, ctx: &Ctx) -> Vec<Candidate> {
        let dim = self.basis.group.dim;
        let mut pool: Vec<(Src, &Vec<i64>)> = ctx.regs.iter().enumerate().map(|(i, r)| (Src::Reg(i), r)).collect();
        pool.extend((0..self.f.len()).filter(|&v| !self.f.is_aux(v)).map(|v| (Src::Weight(v), &ctx.w[v])));
        let zero = vec![0; dim];
        pool.push((Src::Zero, &zero));
        let mut out: Vec<Candidate> = Vec::new();
        let mut push = |value: Vec<i64>, op, x, y| {
            if value.iter().all(|&a| a == 0) || ctx.regs.contains(&value) || out.iter().any(|c| c.value == value) {
                return;
            }
            out.push(Candidate { value, op, x, y });
        };
        for i in 0..pool.len() {
            for j in 0..pool.len() {
                let (a, b) = (pool[i].1, pool[j].1);
                if i <= j {
                    push(a.iter().zip(b).map(|(p, q)| p + q).collect(), BinOp::Add, pool[i].0, pool[j].0);
                }
                if i != j {
                    push(a.iter().zip(b).map(|(p, q)| p - q).collect(), BinOp::Sub, pool[i].0, pool[j].0);
                }
            }
        }
        out
    }

    fn extend(ctx: &Ctx, value: Vec<i64>) -> Ctx {
        let mut c = ctx.clone();
        c.regs.push(value);
        c.budget -= 1;
        c
    }

    fn solve(&mut self, ctx: &Ctx) -> bool {
        let key = Self::key(ctx);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let mut ok = self.ok_here(ctx);
        if !ok && ctx.budget > 0 {
            for cand in self.candidates(ctx) {
                if self.solve(&Self::extend(ctx, cand.value)) {
                    ok = true;
                    break;
                }
            }
        }
        self.memo.insert(key, ok);
        ok
    }

    /// Writes the node for `ctx` into `c.nodes[x]` and recurses; `ctx` must be solvable.
    fn build(&mut self, mut ctx: Ctx, c: &mut ComputationTree, x: usize) {
        let mut instructions = Vec::new();
        while !self.ok_here(&ctx) {
            let cand = self
                .candidates(&ctx)
                .into_iter()
                .find(|cand| self.solve(&Self::extend(&ctx, cand.value.clone())))
                .expect("solvable state has a solvable successor");
            let target = ctx.regs.len() + 1;
            let operand = |s: Src| match s {
                Src::Reg(i) => Operand::Reg(i + 1),
                Src::Weight(v) => Operand::Weight(v),
                Src::Zero => Operand::Reg(target),
            };
            instructions.push(Instruction { target, op: cand.op, x: operand(cand.x), y: operand(cand.y) });
            ctx = Self::extend(&ctx, cand.value);
        }
        c.nodes[x].instructions = instructions;
        if let Some(p) = &ctx.pending {
            let ret = if let Some(i) = ctx.regs.iter().position(|r| r == p) {
                Operand::Reg(i + 1)
            } else if let Some(v) = ctx.w.iter().position(|w| w == p) {
                Operand::Weight(v)
            } else {
                Operand::Reg(ctx.regs.len() + 1)
            };
            c.nodes[x].ret = Some(ret);
        }
        if ctx.remaining == 0 {
            return;
        }
        for l in legal_labels(self.f, &ctx.cut) {
            let child = self.child(&ctx, l);
            let y = c.push(x, l);
            self.build(child, c, y);
        }
    }
}
