//! Decremental connectivity on a rooted forest.
//!
//! Every cut splits one component in two. Both halves are explored by two DFS
//! cursors advanced alternately, one vertex each per step; the half that runs out
//! first is relabelled. A vertex is relabelled only when its component at least
//! halves, so a full teardown touches `O(n log n)` vertices in total.

use crate::error::{Error, Result};
use crate::forest::{RootedForest, NONE};
use crate::probe;

#[derive(Debug, Clone)]
pub struct DecrementalConnectivity {
    pre: Vec<u32>,
    post: Vec<u32>,
    aux: Vec<bool>,
    parent: Vec<u32>,
    children: Vec<Vec<u32>>,
    slot: Vec<u32>,
    label: Vec<u32>,
    label_root: Vec<u32>,
    small: Vec<usize>,
    small_is_child_side: bool,
    touches: u64,
    stack_a: Vec<u32>,
    stack_b: Vec<u32>,
}

impl DecrementalConnectivity {
    pub fn new(f: &RootedForest) -> Self {
        let n = f.len();
        let mut parent = vec![NONE; n];
        let mut children = vec![Vec::new(); n];
        let mut slot = vec![0u32; n];
        for v in 0..n {
            if let Some(p) = f.parent(v) {
                parent[v] = p as u32;
            }
            for (i, &c) in f.children(v).iter().enumerate() {
                children[v].push(c as u32);
                slot[c] = i as u32;
            }
        }
        let (comp, members) = f.components();
        let label = comp.iter().map(|&c| c as u32).collect();
        let label_root = members.iter().map(|m| m[0] as u32).collect();
        DecrementalConnectivity {
            pre: (0..n).map(|v| f.pre(v) as u32).collect(),
            post: (0..n).map(|v| f.post(v) as u32).collect(),
            aux: f.aux_flags().to_vec(),
            parent,
            children,
            slot,
            label,
            label_root,
            small: Vec::new(),
            small_is_child_side: true,
            touches: 0,
            stack_a: Vec::new(),
            stack_b: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: v, len: self.len() })
        }
    }

    /// Removes the edge from `v` to its parent.
    pub fn cut(&mut self, v: usize) -> Result<()> {
        self.check(v)?;
        if self.aux[v] {
            return Err(Error::AuxiliaryVertex(v));
        }
        if self.parent[v] == NONE {
            return Err(Error::NoParent(v));
        }
        self.cut_unchecked(v);
        Ok(())
    }

    /// Cut without legality checks (auxiliary vertices allowed); `v` must have a parent.
    pub(crate) fn cut_unchecked(&mut self, v: usize) {
        let p = self.parent[v] as usize;
        debug_assert_ne!(self.parent[v], NONE);
        let s = self.slot[v] as usize;
        self.children[p].swap_remove(s);
        if let Some(&moved) = self.children[p].get(s) {
            self.slot[moved as usize] = s as u32;
        }
        self.parent[v] = NONE;

        let old = self.label[v] as usize;
        let r = self.label_root[old];
        self.stack_a.clear();
        self.stack_b.clear();
        self.stack_a.push(v as u32);
        self.stack_b.push(r);
        self.small.clear();
        let mut seen_b: Vec<usize> = Vec::new();
        let child_side = loop {
            let x = self.stack_a.pop().expect("cursor a is non-empty");
            self.small.push(x as usize);
            self.stack_a.extend_from_slice(&self.children[x as usize]);
            if self.stack_a.is_empty() {
                break true;
            }
            let y = self.stack_b.pop().expect("cursor b is non-empty");
            seen_b.push(y as usize);
            self.stack_b.extend_from_slice(&self.children[y as usize]);
            if self.stack_b.is_empty() {
                break false;
            }
        };
        let visited = self.small.len() + seen_b.len();
        self.touches += visited as u64;
        probe::tick(visited as u64);

        let fresh = self.label_root.len() as u32;
        if child_side {
            self.label_root.push(v as u32);
        } else {
            self.small = seen_b;
            self.label_root.push(r);
            self.label_root[old] = v as u32;
        }
        for &x in &self.small {
            self.label[x] = fresh;
        }
        self.small_is_child_side = child_side;
    }

    /// Vertices of the side relabelled by the most recent cut, and whether it is the
    /// side containing the cut vertex.
    pub fn last_smaller_side(&self) -> (&[usize], bool) {
        (&self.small, self.small_is_child_side)
    }

    pub fn root(&self, v: usize) -> Result<usize> {
        self.check(v)?;
        Ok(self.root_unchecked(v))
    }

    #[inline]
    pub(crate) fn root_unchecked(&self, v: usize) -> usize {
        self.label_root[self.label[v] as usize] as usize
    }

    pub fn connected(&self, u: usize, v: usize) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.connected_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn connected_unchecked(&self, u: usize, v: usize) -> bool {
        self.label[u] == self.label[v]
    }

    /// Reflexive ancestor test in the current forest.
    pub fn ancestor(&self, u: usize, v: usize) -> Result<bool> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.ancestor_unchecked(u, v))
    }

    #[inline]
    pub(crate) fn ancestor_unchecked(&self, u: usize, v: usize) -> bool {
        self.pre[u] <= self.pre[v] && self.post[u] >= self.post[v] && self.connected_unchecked(u, v)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        let p = self.parent[v];
        (p != NONE).then_some(p as usize)
    }

    pub fn has_parent(&self, v: usize) -> bool {
        self.parent[v] != NONE
    }

    pub fn is_aux(&self, v: usize) -> bool {
        self.aux[v]
    }

    pub fn children(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.children[v].iter().map(|&c| c as usize)
    }

    /// Vertices visited by all cut traversals so far.
    pub fn touches(&self) -> u64 {
        self.touches
    }
}
