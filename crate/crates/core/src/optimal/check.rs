use std::collections::HashMap;

use crate::forest::RootedForest;
use crate::group::VecGroup;

use super::model::{validate, ComputationTree, Label, Machine};

/// Symbolic weights in `Z^(n'+m)`: the `i`-th non-auxiliary vertex starts at `e_i`,
/// auxiliary vertices at zero, and the `j`-th update writes `e_(n'+j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisWeights {
    pub group: VecGroup,
    pub n_real: usize,
    pub initial: Vec<Vec<i64>>,
}

impl BasisWeights {
    pub fn new(f: &RootedForest, m: usize) -> Self {
        let n_real = (0..f.len()).filter(|&v| !f.is_aux(v)).count();
        let group = VecGroup { dim: n_real + m };
        let mut next = 0;
        let initial = (0..f.len())
            .map(|v| {
                if f.is_aux(v) {
                    vec![0; group.dim]
                } else {
                    next += 1;
                    group.basis(next - 1)
                }
            })
            .collect();
        BasisWeights { group, n_real, initial }
    }

    /// Value written by the `j`-th update (0-based).
    pub fn update_value(&self, j: usize) -> Vec<i64> {
        self.group.basis(self.n_real + j)
    }
}

/// Sum of the current weights in the component of `v` once the vertices flagged
/// in `cut` have lost their parent edge.
pub fn expected_answer(f: &RootedForest, cut: &[bool], w: &[Vec<i64>], v: usize) -> Vec<i64> {
    let root = |mut x: usize| {
        while let (false, Some(p)) = (cut[x], f.parent(x)) {
            x = p;
        }
        x
    };
    let r = root(v);
    let mut sum = vec![0; w.first().map_or(0, Vec::len)];
    for u in (0..f.len()).filter(|&u| root(u) == r) {
        for (s, x) in sum.iter_mut().zip(&w[u]) {
            *s += x;
        }
    }
    sum
}

/// Whether `c` is a valid computation tree of height `m` for `f` that answers every
/// operation sequence of length at most `m` correctly over every commutative group.
///
/// Runs every root-to-leaf path once over `Z^(n'+m)` with [`BasisWeights`]; a
/// tree-sum answer is correct iff it is exactly the indicator of the current
/// weights in the queried component.
pub fn check_correct(c: &ComputationTree, f: &RootedForest, m: usize) -> bool {
    if c.height != m || !validate(c, f).is_empty() {
        return false;
    }
    let basis = BasisWeights::new(f, m);
    let g = basis.group;
    let mut machine = Machine { g: &g, regs: HashMap::new(), w: basis.initial.clone() };
    machine.run(&c.nodes[0].instructions);
    // (node, registers, weights, cut flags, updates so far)
    let mut stack = vec![(0usize, machine.regs, machine.w, vec![false; f.len()], 0usize)];
    while let Some((x, regs, w, cut, updates)) = stack.pop() {
        for &y in &c.nodes[x].children {
            let label = c.nodes[y].label.expect("validated");
            let mut m = Machine { g: &g, regs: regs.clone(), w: w.clone() };
            let mut cut = cut.clone();
            let mut updates = updates;
            match label {
                Label::Cut(v) => cut[v] = true,
                Label::Update(v) => {
                    m.w[v] = basis.update_value(updates);
                    updates += 1;
                }
                Label::TreeSum(_) => {}
            }
            m.run(&c.nodes[y].instructions);
            if let Label::TreeSum(v) = label {
                let got = m.read(&c.nodes[y].ret.expect("validated"));
                if got != expected_answer(f, &cut, &m.w, v) {
                    return false;
                }
            }
            stack.push((y, m.regs, m.w, cut, updates));
        }
    }
    true
}
