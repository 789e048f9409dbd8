use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::group::Group;

/// A register `R[i]` (`i >= 1`) or the current weight `W[v]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operand {
    Reg(usize),
    Weight(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
}

/// `R[target] <- x op y`; operands are read before the target is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub target: usize,
    pub op: BinOp,
    pub x: Operand,
    pub y: Operand,
}

/// Edge label of a computation tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Cut(usize),
    TreeSum(usize),
    Update(usize),
}

impl Label {
    pub fn vertex(&self) -> usize {
        match *self {
            Label::Cut(v) | Label::TreeSum(v) | Label::Update(v) => v,
        }
    }
}

/// One operation with its update value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step<E> {
    Cut(usize),
    TreeSum(usize),
    Update(usize, E),
}

impl<E> Step<E> {
    pub fn label(&self) -> Label {
        match *self {
            Step::Cut(v) => Label::Cut(v),
            Step::TreeSum(v) => Label::TreeSum(v),
            Step::Update(v, _) => Label::Update(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CtNode {
    pub parent: Option<usize>,
    /// Label of the edge from the parent.
    pub label: Option<Label>,
    pub instructions: Vec<Instruction>,
    /// Return value `E_x`, present exactly on tree-sum children.
    pub ret: Option<Operand>,
    pub children: Vec<usize>,
}

/// Node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputationTree {
    pub height: usize,
    pub nodes: Vec<CtNode>,
}

impl ComputationTree {
    /// A root without instructions and no edges.
    pub fn leaf() -> Self {
        ComputationTree { height: 0, nodes: vec![CtNode::default()] }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn child(&self, x: usize, label: Label) -> Option<usize> {
        self.nodes[x].children.iter().copied().find(|&c| self.nodes[c].label == Some(label))
    }

    /// Adds a child of `parent` and returns its id.
    pub fn push(&mut self, parent: usize, label: Label) -> usize {
        let id = self.nodes.len();
        self.nodes.push(CtNode { parent: Some(parent), label: Some(label), ..CtNode::default() });
        self.nodes[parent].children.push(id);
        id
    }

    /// Instruction depth of every node: instructions on the path from the root,
    /// both ends included. Parents must precede children.
    pub fn instruction_depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for (x, node) in self.nodes.iter().enumerate() {
            d[x] = node.parent.map_or(0, |p| d[p]) + node.instructions.len();
        }
        d
    }

    /// Maximum instruction depth.
    pub fn mid(&self) -> usize {
        self.instruction_depths().into_iter().max().unwrap_or(0)
    }

    /// Largest register index mentioned anywhere.
    pub fn max_register(&self) -> usize {
        let reg = |o: &Operand| if let Operand::Reg(i) = *o { i } else { 0 };
        self.nodes
            .iter()
            .flat_map(|n| {
                n.instructions.iter().flat_map(move |i| [i.target, reg(&i.x), reg(&i.y)]).chain(n.ret.iter().map(reg))
            })
            .max()
            .unwrap_or(0)
    }
}

/// Labels available after the vertices in `cut` have been cut: `cut(v)` for
/// non-auxiliary non-roots not cut yet, `tree-sum(v)` for every vertex and
/// `update-weight(v)` for non-auxiliary vertices. Sorted.
pub fn legal_labels(f: &RootedForest, cut: &[bool]) -> Vec<Label> {
    let n = f.len();
    let mut out = Vec::with_capacity(3 * n);
    out.extend((0..n).filter(|&v| !f.is_aux(v) && f.parent(v).is_some() && !cut[v]).map(Label::Cut));
    out.extend((0..n).map(Label::TreeSum));
    out.extend((0..n).filter(|&v| !f.is_aux(v)).map(Label::Update));
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub node: usize,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}: {}", self.node, self.message)
    }
}

/// Checks the structural validity conditions: legal cut labels along every path,
/// full fan-out above the bottom level, distinct labels per node, every leaf at
/// depth `height`, return values exactly on tree-sum children and operands in range.
pub fn validate(c: &ComputationTree, f: &RootedForest) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut bad = |node: usize, message: String| out.push(Violation { node, message });
    if c.nodes.is_empty() {
        bad(0, "no root".into());
        return out;
    }
    if c.nodes[0].parent.is_some() || c.nodes[0].label.is_some() {
        bad(0, "root has a parent".into());
    }
    let n = f.len();
    let check_operand = |o: &Operand| match *o {
        Operand::Reg(i) => i >= 1,
        Operand::Weight(v) => v < n,
    };
    // (node, depth, cut flags)
    let mut stack = vec![(0usize, 0usize, vec![false; n])];
    let mut seen = vec![false; c.nodes.len()];
    while let Some((x, depth, cut)) = stack.pop() {
        if std::mem::replace(&mut seen[x], true) {
            bad(x, "reached twice".into());
            continue;
        }
        let node = &c.nodes[x];
        for ins in &node.instructions {
            if ins.target == 0 || !check_operand(&ins.x) || !check_operand(&ins.y) {
                bad(x, format!("operand out of range in {ins:?}"));
            }
        }
        match (node.label, node.ret) {
            (Some(Label::TreeSum(_)), None) => bad(x, "tree-sum child without return value".into()),
            (Some(Label::TreeSum(_)), Some(r)) if !check_operand(&r) => bad(x, "return value out of range".into()),
            (Some(Label::TreeSum(_)), Some(_)) => {}
            (_, Some(_)) => bad(x, "return value on a non-tree-sum node".into()),
            _ => {}
        }
        let labels: Vec<Label> = node.children.iter().filter_map(|&ch| c.nodes.get(ch)?.label).collect();
        if labels.len() != node.children.len() {
            bad(x, "child without label or out of range".into());
            continue;
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            bad(x, "two children share a label".into());
        }
        sorted.dedup();
        if depth < c.height {
            let want = legal_labels(f, &cut);
            if sorted != want {
                bad(x, format!("children {sorted:?} differ from the legal labels {want:?}"));
            }
        } else if !node.children.is_empty() {
            bad(x, format!("node at depth {depth} below height {}", c.height));
        }
        for &ch in &node.children {
            if c.nodes[ch].parent != Some(x) {
                bad(ch, "parent pointer disagrees with child list".into());
            }
            let label = c.nodes[ch].label.expect("checked above");
            let mut cut2 = cut.clone();
            if label.vertex() >= n {
                bad(ch, format!("label {label:?} out of range"));
                continue;
            }
            if let Label::Cut(v) = label {
                if f.is_aux(v) || f.parent(v).is_none() || cut[v] {
                    bad(ch, format!("illegal cut({v})"));
                }
                cut2[v] = true;
            }
            if let Label::Update(v) = label {
                if f.is_aux(v) {
                    bad(ch, format!("update of auxiliary vertex {v}"));
                }
            }
            stack.push((ch, depth + 1, cut2));
        }
    }
    if let Some(x) = seen.iter().position(|&s| !s) {
        bad(x, "unreachable node".into());
    }
    out
}

/// Register indices at every node are at most its instruction depth.
pub fn validate_succinct(c: &ComputationTree) -> Vec<Violation> {
    let depth = c.instruction_depths();
    let mut out = Vec::new();
    for (x, node) in c.nodes.iter().enumerate() {
        let over = |o: &Operand| matches!(*o, Operand::Reg(i) if i > depth[x]);
        let bad_ins = node.instructions.iter().any(|i| i.target > depth[x] || over(&i.x) || over(&i.y));
        if bad_ins || node.ret.as_ref().is_some_and(over) {
            out.push(Violation { node: x, message: format!("register index above instruction depth {}", depth[x]) });
        }
    }
    out
}

/// Register file and weights while executing a computation tree.
pub(crate) struct Machine<'a, G: Group> {
    pub g: &'a G,
    pub regs: HashMap<usize, G::Elem>,
    pub w: Vec<G::Elem>,
}

impl<G: Group> Machine<'_, G> {
    pub fn read(&self, o: &Operand) -> G::Elem {
        match *o {
            Operand::Reg(i) => self.regs.get(&i).cloned().unwrap_or_else(|| self.g.zero()),
            Operand::Weight(v) => self.w[v].clone(),
        }
    }

    pub fn run(&mut self, ins: &[Instruction]) {
        for i in ins {
            let (x, y) = (self.read(&i.x), self.read(&i.y));
            let r = match i.op {
                BinOp::Add => self.g.add(&x, &y),
                BinOp::Sub => self.g.sub(&x, &y),
            };
            self.regs.insert(i.target, r);
        }
    }
}

/// Output of `c` on initial weights `weights` and operations `sigma`: one value per
/// tree-sum.
pub fn evaluate<G: Group>(c: &ComputationTree, g: &G, weights: &[G::Elem], sigma: &[Step<G::Elem>]) -> Result<Vec<G::Elem>> {
    if sigma.len() > c.height {
        return Err(Error::IllegalSequence(format!("{} operations exceed height {}", sigma.len(), c.height)));
    }
    let mut m = Machine { g, regs: HashMap::new(), w: weights.to_vec() };
    let mut x = 0;
    m.run(&c.nodes[0].instructions);
    let mut out = Vec::new();
    for (i, step) in sigma.iter().enumerate() {
        let y = c
            .child(x, step.label())
            .ok_or_else(|| Error::IllegalSequence(format!("no edge {:?} at operation {i}", step.label())))?;
        if let Step::Update(v, val) = step {
            m.w[*v] = val.clone();
        }
        m.run(&c.nodes[y].instructions);
        if let Step::TreeSum(_) = step {
            let r = c.nodes[y].ret.ok_or_else(|| Error::IllegalSequence(format!("node {y} has no return value")))?;
            out.push(m.read(&r));
        }
        x = y;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::IntGroup;

    fn single() -> RootedForest {
        RootedForest::new(&[None], &[]).unwrap()
    }

    fn single_tree() -> ComputationTree {
        let mut c = ComputationTree { height: 1, nodes: vec![CtNode::default()] };
        c.push(0, Label::TreeSum(0));
        c.nodes[1].ret = Some(Operand::Weight(0));
        c.push(0, Label::Update(0));
        c
    }

    #[test]
    fn height_zero_is_valid() {
        assert!(validate(&ComputationTree::leaf(), &single()).is_empty());
        assert_eq!(evaluate(&ComputationTree::leaf(), &IntGroup, &[4], &[]).unwrap(), Vec::<i64>::new());
    }

    #[test]
    fn single_vertex_query() {
        let c = single_tree();
        assert!(validate(&c, &single()).is_empty());
        assert_eq!(c.mid(), 0);
        assert_eq!(evaluate(&c, &IntGroup, &[7], &[Step::TreeSum(0)]).unwrap(), vec![7]);
        assert!(evaluate(&c, &IntGroup, &[7], &[Step::TreeSum(0), Step::TreeSum(0)]).is_err());
    }

    #[test]
    fn missing_edge_and_duplicate_cut() {
        let mut c = single_tree();
        c.nodes[0].children.pop();
        assert!(!validate(&c, &single()).is_empty());

        let f = RootedForest::new(&[None, Some(0)], &[]).unwrap();
        let mut c = ComputationTree { height: 2, nodes: vec![CtNode::default()] };
        let a = c.push(0, Label::Cut(1));
        c.push(a, Label::Cut(1));
        let v = validate(&c, &f);
        assert!(v.iter().any(|x| x.message.contains("illegal cut(1)")), "{v:?}");
    }

    #[test]
    fn succinct_indices() {
        let mut c = single_tree();
        c.nodes[1].ret = Some(Operand::Reg(1));
        assert_eq!(validate_succinct(&c).len(), 1);
        c.nodes[1].instructions.push(Instruction { target: 1, op: BinOp::Add, x: Operand::Weight(0), y: Operand::Reg(1) });
        assert!(validate_succinct(&c).is_empty());
        assert_eq!(evaluate(&c, &IntGroup, &[7], &[Step::TreeSum(0)]).unwrap(), vec![7]);
    }
}
