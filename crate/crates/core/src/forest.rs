//! Static rooted forests with dense vertex ids.

use crate::error::{Error, Result};

/// Marker for "no vertex" in flat `u32` arrays.
pub(crate) const NONE: u32 = u32::MAX;

/// An immutable rooted forest on vertices `0..n`.
///
/// Children are stored in input order; `pre`/`post` come from a DFS that visits
/// roots and children in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedForest {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    aux: Vec<bool>,
    pre: Vec<usize>,
    post: Vec<usize>,
}

impl RootedForest {
    /// Builds a forest from a parent array. `aux` may be shorter than `parents`;
    /// missing flags default to `false`.
    pub fn new(parents: &[Option<usize>], aux: &[bool]) -> Result<Self> {
        let n = parents.len();
        if aux.len() > n {
            return Err(Error::IndexOutOfRange { index: aux.len() - 1, len: n });
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::IndexOutOfRange { index: p, len: n });
                }
                if p == v {
                    return Err(Error::CycleDetected(v));
                }
                children[p].push(v);
            }
        }
        let mut aux_flags = aux.to_vec();
        aux_flags.resize(n, false);

        let mut pre = vec![usize::MAX; n];
        let mut post = vec![usize::MAX; n];
        let (mut pre_clock, mut post_clock) = (0, 0);
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for r in 0..n {
            if parents[r].is_some() {
                continue;
            }
            stack.push((r, 0));
            pre[r] = pre_clock;
            pre_clock += 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < children[v].len() {
                    let c = children[v][*next];
                    *next += 1;
                    pre[c] = pre_clock;
                    pre_clock += 1;
                    stack.push((c, 0));
                } else {
                    post[v] = post_clock;
                    post_clock += 1;
                    stack.pop();
                }
            }
        }
        if let Some(v) = pre.iter().position(|&x| x == usize::MAX) {
            // unreachable from any root: lies on a cycle or hangs below one
            let mut u = v;
            for _ in 0..n {
                u = parents[u].expect("vertex unreachable from a root has a parent");
            }
            return Err(Error::CycleDetected(u));
        }
        Ok(RootedForest { parent: parents.to_vec(), children, aux: aux_flags, pre, post })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn is_aux(&self, v: usize) -> bool {
        self.aux[v]
    }

    pub fn aux_flags(&self) -> &[bool] {
        &self.aux
    }

    pub fn pre(&self, v: usize) -> usize {
        self.pre[v]
    }

    pub fn post(&self, v: usize) -> usize {
        self.post[v]
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&v| self.parent[v].is_none())
    }

    pub fn is_binary(&self) -> bool {
        self.children.iter().all(|c| c.len() <= 2)
    }

    pub(crate) fn check(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: v, len: self.len() })
        }
    }

    /// Reflexive ancestor test in this (static) forest.
    pub fn is_ancestor(&self, u: usize, v: usize) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.is_ancestor_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn is_ancestor_unchecked(&self, u: usize, v: usize) -> bool {
        self.pre[u] <= self.pre[v] && self.post[u] >= self.post[v]
    }

    /// Vertices in DFS pre-order.
    pub fn preorder(&self) -> Vec<usize> {
        let mut order = vec![0; self.len()];
        for v in 0..self.len() {
            order[self.pre[v]] = v;
        }
        order
    }

    /// Static component id of each vertex plus, per component, its vertices in pre-order.
    pub fn components(&self) -> (Vec<usize>, Vec<Vec<usize>>) {
        let mut comp = vec![0; self.len()];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for v in self.preorder() {
            match self.parent[v] {
                None => {
                    comp[v] = members.len();
                    members.push(vec![v]);
                }
                Some(p) => {
                    comp[v] = comp[p];
                    members[comp[v]].push(v);
                }
            }
        }
        (comp, members)
    }

    /// The subforest induced by `vertices` (given in pre-order of a connected set or any
    /// order), relabelled to `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> RootedForest {
        let mut local = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &v) in vertices.iter().enumerate() {
            local.insert(v, i);
        }
        let parents: Vec<Option<usize>> = vertices
            .iter()
            .map(|&v| self.parent[v].and_then(|p| local.get(&p).copied()))
            .collect();
        let aux: Vec<bool> = vertices.iter().map(|&v| self.aux[v]).collect();
        RootedForest::new(&parents, &aux).expect("induced subforest of a forest is a forest")
    }
}

/// Builds a forest; alias kept for the operation name used across the crate docs.
pub fn build_forest(parents: &[Option<usize>], aux: &[bool]) -> Result<RootedForest> {
    RootedForest::new(parents, aux)
}

/// Reflexive ancestor test using the pre/post numbering.
pub fn is_ancestor_static(f: &RootedForest, u: usize, v: usize) -> Result<bool> {
    f.is_ancestor(u, v)
}
