use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::group::Group;
use crate::tree_sum::TreeSumEngine;

use super::model::{legal_labels, BinOp, ComputationTree, CtNode, Instruction, Label, Machine, Operand};

/// Tree-sum operations with a plain cut.
pub trait GroupStructure<G: Group> {
    fn tree_sum(&mut self, v: usize) -> G::Elem;
    fn update_weight(&mut self, v: usize, x: G::Elem);
    fn cut(&mut self, v: usize);
}

/// A [`TreeSumEngine`] seen as a [`GroupStructure`]; cuts discard the report.
pub struct EngineAdapter<E>(pub E);

impl<G: Group, E: TreeSumEngine<G>> GroupStructure<G> for EngineAdapter<E> {
    fn tree_sum(&mut self, v: usize) -> G::Elem {
        self.0.tree_sum(v)
    }
    fn update_weight(&mut self, v: usize, x: G::Elem) {
        self.0.update_weight(v, x)
    }
    fn cut(&mut self, v: usize) {
        self.0.cut_report(v);
    }
}

/// Data structure that walks a computation tree: every operation follows one edge
/// and runs that node's instructions, one group operation each.
#[derive(Debug, Clone)]
pub struct CtStructure<G: Group> {
    tree: Arc<ComputationTree>,
    g: G,
    node: usize,
    depth: usize,
    regs: HashMap<usize, G::Elem>,
    w: Vec<G::Elem>,
}

pub fn tree_to_structure<G: Group>(c: Arc<ComputationTree>, g: G, weights: Vec<G::Elem>) -> CtStructure<G> {
    CtStructure::new(c, g, weights)
}

impl<G: Group> CtStructure<G> {
    pub fn new(tree: Arc<ComputationTree>, g: G, weights: Vec<G::Elem>) -> Self {
        let mut m = Machine { g: &g, regs: HashMap::new(), w: weights };
        m.run(&tree.nodes[0].instructions);
        let (regs, w) = (m.regs, m.w);
        CtStructure { tree, g, node: 0, depth: 0, regs, w }
    }

    /// Operations left before the tree's height is reached.
    pub fn remaining(&self) -> usize {
        self.tree.height - self.depth
    }

    fn step(&mut self, label: Label, value: Option<G::Elem>) -> Result<Option<G::Elem>> {
        let y = self
            .tree
            .child(self.node, label)
            .ok_or_else(|| Error::IllegalSequence(format!("no edge {label:?} at depth {}", self.depth)))?;
        let mut m = Machine { g: &self.g, regs: std::mem::take(&mut self.regs), w: std::mem::take(&mut self.w) };
        if let Some(x) = value {
            m.w[label.vertex()] = x;
        }
        m.run(&self.tree.nodes[y].instructions);
        let out = self.tree.nodes[y].ret.map(|r| m.read(&r));
        (self.regs, self.w) = (m.regs, m.w);
        self.node = y;
        self.depth += 1;
        Ok(out)
    }

    pub fn try_tree_sum(&mut self, v: usize) -> Result<G::Elem> {
        self.step(Label::TreeSum(v), None)?.ok_or_else(|| Error::IllegalSequence("tree-sum node without return value".into()))
    }

    pub fn try_update_weight(&mut self, v: usize, x: G::Elem) -> Result<()> {
        self.step(Label::Update(v), Some(x)).map(|_| ())
    }

    pub fn try_cut(&mut self, v: usize) -> Result<()> {
        self.step(Label::Cut(v), None).map(|_| ())
    }
}

/// Panics once more operations arrive than the tree's height allows.
impl<G: Group> GroupStructure<G> for CtStructure<G> {
    fn tree_sum(&mut self, v: usize) -> G::Elem {
        self.try_tree_sum(v).expect("operation within the computation tree")
    }
    fn update_weight(&mut self, v: usize, x: G::Elem) {
        self.try_update_weight(v, x).expect("operation within the computation tree")
    }
    fn cut(&mut self, v: usize) {
        self.try_cut(v).expect("operation within the computation tree")
    }
}

/// Symbolic element of a [`TraceGroup`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Zero,
    /// The weight of `v` after its `version`-th update (version 0 is initial).
    Weight { v: usize, version: u32 },
    /// Result of the `i`-th logged operation.
    Value(u32),
}

/// Group whose operations are recorded instead of computed.
#[derive(Debug, Clone, Default)]
pub struct TraceGroup {
    log: Arc<Mutex<Vec<(BinOp, Sym, Sym)>>>,
}

impl TraceGroup {
    pub fn new() -> Self {
        Self::default()
    }

    fn record(&self, op: BinOp, a: Sym, b: Sym) -> Sym {
        let mut log = self.log.lock().unwrap_or_else(|e| e.into_inner());
        log.push((op, a, b));
        Sym::Value(log.len() as u32 - 1)
    }

    pub fn log(&self) -> Vec<(BinOp, Sym, Sym)> {
        self.log.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    fn len(&self) -> usize {
        self.log.lock().unwrap_or_else(|e| e.into_inner()).len()
    }
}

impl Group for TraceGroup {
    type Elem = Sym;
    fn zero(&self) -> Sym {
        Sym::Zero
    }
    fn add(&self, a: &Sym, b: &Sym) -> Sym {
        self.record(BinOp::Add, *a, *b)
    }
    fn sub(&self, a: &Sym, b: &Sym) -> Sym {
        self.record(BinOp::Sub, *a, *b)
    }
}

type Factory<'a> = dyn Fn(&RootedForest, Vec<Sym>, TraceGroup) -> Box<dyn GroupStructure<TraceGroup>> + 'a;

/// Operations logged by one replay: per segment (preprocessing, then one per
/// operation) the log range, plus the tree-sum results.
#[derive(PartialEq, Eq)]
struct Replay {
    log: Vec<(BinOp, Sym, Sym)>,
    ends: Vec<usize>,
    ret: Option<Sym>,
}

fn replay(factory: &Factory<'_>, f: &RootedForest, path: &[Label]) -> Replay {
    let g = TraceGroup::new();
    let w: Vec<Sym> = (0..f.len()).map(|v| if f.is_aux(v) { Sym::Zero } else { Sym::Weight { v, version: 0 } }).collect();
    let mut d = factory(f, w, g.clone());
    let mut ends = vec![g.len()];
    let mut versions = vec![0u32; f.len()];
    let mut ret = None;
    for &l in path {
        ret = None;
        match l {
            Label::Cut(v) => d.cut(v),
            Label::TreeSum(v) => ret = Some(d.tree_sum(v)),
            Label::Update(v) => {
                versions[v] += 1;
                d.update_weight(v, Sym::Weight { v, version: versions[v] });
            }
        }
        ends.push(g.len());
    }
    Replay { log: g.log(), ends, ret }
}

/// The computation tree of height `m` recorded from the structure built by
/// `factory`: every node's instructions are the group operations the structure
/// performs for the operation on the edge into it.
///
/// A structure may keep a weight after that weight has been overwritten by an
/// update. Such a value is saved into a register by a copy instruction
/// (`R[i] <- W[v] + R[i]`, reading the still-unwritten `R[i]` as zero) at the
/// parent of the update edge.
pub fn structure_to_tree(factory: &Factory<'_>, f: &RootedForest, m: usize) -> Result<ComputationTree> {
    // Skeleton: the unique valid tree of height m, with the path to every node.
    let mut c = ComputationTree { height: m, nodes: vec![CtNode::default()] };
    let mut paths: Vec<Vec<Label>> = vec![Vec::new()];
    let mut cuts: Vec<Vec<bool>> = vec![vec![false; f.len()]];
    let mut x = 0;
    while x < c.nodes.len() {
        if paths[x].len() < m {
            for l in legal_labels(f, &cuts[x]) {
                c.push(x, l);
                let mut p = paths[x].clone();
                p.push(l);
                let mut cut = cuts[x].clone();
                if let Label::Cut(v) = l {
                    cut[v] = true;
                }
                paths.push(p);
                cuts.push(cut);
            }
        }
        x += 1;
    }

    let mut replays = Vec::with_capacity(c.nodes.len());
    for (x, path) in paths.iter().enumerate() {
        let r = replay(factory, f, path);
        if replay(factory, f, path) != r {
            return Err(Error::NondeterministicStructure);
        }
        if let Some(p) = c.nodes[x].parent {
            let prev: &Replay = &replays[p];
            let cut = *r.ends.get(path.len() - 1).unwrap_or(&0);
            if r.ends[..path.len()] != prev.ends[..] || r.log[..cut] != prev.log[..] {
                return Err(Error::NondeterministicStructure);
            }
        }
        replays.push(r);
    }

    // Stale weights and the node that must copy them.
    let mut copies: Vec<BTreeSet<(usize, u32)>> = vec![BTreeSet::new(); c.nodes.len()];
    for (x, path) in paths.iter().enumerate() {
        let r = &replays[x];
        let seg = *r.ends.get(path.len().wrapping_sub(1)).unwrap_or(&0)..r.ends[path.len()];
        let mut versions = vec![0u32; f.len()];
        for l in path {
            if let Label::Update(v) = l {
                versions[*v] += 1;
            }
        }
        let used = r.log[seg].iter().flat_map(|&(_, a, b)| [a, b]).chain(r.ret);
        for s in used {
            if let Sym::Weight { v, version } = s {
                if version < versions[v] {
                    // parent of the edge that performed update number version + 1 of v
                    let mut seen = 0;
                    let i = path
                        .iter()
                        .position(|l| {
                            seen += (*l == Label::Update(v)) as u32;
                            seen == version + 1
                        })
                        .expect("a later update exists");
                    let mut anc = x;
                    for _ in i..path.len() {
                        anc = c.nodes[anc].parent.expect("ancestor on the path");
                    }
                    copies[anc].insert((v, version));
                }
            }
        }
    }

    // Instructions with fresh registers numbered along each path.
    struct Frame {
        x: usize,
        values: HashMap<u32, usize>,
        saved: HashMap<(usize, u32), usize>,
        versions: Vec<u32>,
        next: usize,
    }
    let mut stack = vec![Frame { x: 0, values: HashMap::new(), saved: HashMap::new(), versions: vec![0; f.len()], next: 1 }];
    while let Some(mut fr) = stack.pop() {
        let x = fr.x;
        let depth = paths[x].len();
        if let Some(Label::Update(v)) = c.nodes[x].label {
            fr.versions[v] += 1;
        }
        let r = &replays[x];
        let start = if depth == 0 { 0 } else { r.ends[depth - 1] };
        let map = |s: Sym, target: usize, fr: &Frame| match s {
            Sym::Zero => Operand::Reg(target),
            Sym::Value(i) => Operand::Reg(fr.values[&i]),
            Sym::Weight { v, version } if version == fr.versions[v] => Operand::Weight(v),
            Sym::Weight { v, version } => Operand::Reg(fr.saved[&(v, version)]),
        };
        let mut ins = Vec::new();
        for (i, &(op, a, b)) in r.log.iter().enumerate().take(r.ends[depth]).skip(start) {
            let target = fr.next;
            ins.push(Instruction { target, op, x: map(a, target, &fr), y: map(b, target, &fr) });
            fr.values.insert(i as u32, target);
            fr.next += 1;
        }
        for &(v, version) in &copies[x] {
            let target = fr.next;
            ins.push(Instruction { target, op: BinOp::Add, x: Operand::Weight(v), y: Operand::Reg(target) });
            fr.saved.insert((v, version), target);
            fr.next += 1;
        }
        if let Some(Label::TreeSum(_)) = c.nodes[x].label {
            let ret = r.ret.expect("tree-sum replay returns a value");
            // auxiliary weights are never updated, so they stay zero
            let aux_zero = (0..f.len()).find(|&v| f.is_aux(v)).map(Operand::Weight);
            c.nodes[x].ret = Some(match (ret, aux_zero) {
                (Sym::Zero, Some(z)) => z,
                _ => map(ret, fr.next, &fr),
            });
        }
        c.nodes[x].instructions = ins;
        for &y in &c.nodes[x].children {
            stack.push(Frame {
                x: y,
                values: fr.values.clone(),
                saved: fr.saved.clone(),
                versions: fr.versions.clone(),
                next: fr.next,
            });
        }
    }
    Ok(c)
}
