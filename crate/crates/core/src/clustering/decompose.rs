use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::forest::{RootedForest, NONE};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cluster {
    pub id: usize,
    /// Members in DFS pre-order; `vertices[0] == ub`.
    pub vertices: Vec<usize>,
    pub ub: usize,
    pub lb: Option<usize>,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// A partition of a binary tree into clusters plus the cluster tree over the
/// boundary vertices.
#[derive(Debug, Clone)]
pub struct ClusterDecomposition {
    pub k: usize,
    pub clusters: Vec<Cluster>,
    pub cluster_of: Vec<usize>,
    /// Cluster-tree vertex index of each tree vertex, if it is a boundary vertex.
    boundary_index: Vec<u32>,
    /// Tree vertex of each cluster-tree vertex.
    pub boundary: Vec<usize>,
    /// Cluster tree over `boundary` indices.
    pub cluster_tree: RootedForest,
}

impl ClusterDecomposition {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn boundary_index(&self, v: usize) -> Option<usize> {
        let i = self.boundary_index[v];
        (i != NONE).then_some(i as usize)
    }

    /// One line per cluster: `cluster <id> ub=<v> lb=<v|-> members=a,b,...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for c in &self.clusters {
            let lb = c.lb.map_or("-".to_string(), |x| x.to_string());
            let members: Vec<String> = c.vertices.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "cluster {} ub={} lb={} members={}", c.id, c.ub, lb, members.join(","));
        }
        out
    }

    /// Cluster-tree parent array (over tree vertex ids) recomputed from the
    /// clusters alone.
    pub fn cluster_tree_from_clusters(clusters: &[Cluster], t: &RootedForest) -> Vec<(usize, Option<usize>)> {
        let mut cluster_of = vec![usize::MAX; t.len()];
        for c in clusters {
            for &v in &c.vertices {
                cluster_of[v] = c.id;
            }
        }
        let mut out = Vec::new();
        for c in clusters {
            let up = t.parent(c.ub);
            out.push((c.ub, up));
            if let Some(lb) = c.lb {
                if lb != c.ub {
                    out.push((lb, Some(c.ub)));
                }
            }
            debug_assert!(up.is_none_or(|p| cluster_of[p] != c.id));
        }
        out.sort_unstable();
        out
    }
}

/// Bottom-up cluster decomposition of a binary tree into clusters of at most `k`
/// vertices, at most `6n/k` of them.
///
/// A vertex starts a singleton cluster `{v}` with `ub = lb = v` when its children's
/// open clusters total at least `k` vertices or both have a lower boundary;
/// otherwise it absorbs them.
pub fn decompose(t: &RootedForest, k: usize) -> Result<ClusterDecomposition> {
    let n = t.len();
    if n == 0 || t.roots().count() != 1 {
        return Err(Error::NotATree);
    }
    if let Some(v) = (0..n).find(|&v| t.children(v).len() > 2) {
        return Err(Error::NotBinary(v));
    }
    if k == 0 {
        return Err(Error::ValueOutOfRange { value: 0, lo: 1, hi: n as i64 });
    }

    // Size and lower boundary of the open cluster returned for each vertex, and
    // whether each vertex's open cluster was absorbed by its parent.
    let mut size = vec![0usize; n];
    let mut lb = vec![NONE; n];
    let mut absorbed = vec![false; n];
    let order = t.preorder();
    for &v in order.iter().rev() {
        let ch = t.children(v);
        let total: usize = ch.iter().map(|&c| size[c]).sum();
        let with_lb = ch.iter().filter(|&&c| lb[c] != NONE).count();
        if total >= k || with_lb == 2 {
            size[v] = 1;
            lb[v] = v as u32;
        } else {
            size[v] = 1 + total;
            lb[v] = ch.iter().map(|&c| lb[c]).find(|&x| x != NONE).unwrap_or(NONE);
            for &c in ch {
                absorbed[c] = true;
            }
        }
    }

    let mut cluster_of = vec![0usize; n];
    let mut clusters: Vec<Cluster> = Vec::new();
    for &v in &order {
        if absorbed[v] {
            let c = cluster_of[t.parent(v).expect("absorbed vertex has a parent")];
            cluster_of[v] = c;
            clusters[c].vertices.push(v);
        } else {
            let id = clusters.len();
            cluster_of[v] = id;
            let l = lb[v];
            clusters.push(Cluster { id, vertices: vec![v], ub: v, lb: (l != NONE).then_some(l as usize) });
        }
    }

    let mut boundary_index = vec![NONE; n];
    let mut boundary = Vec::new();
    for &v in &order {
        let c = &clusters[cluster_of[v]];
        if c.ub == v || c.lb == Some(v) {
            boundary_index[v] = boundary.len() as u32;
            boundary.push(v);
        }
    }
    let s_parents: Vec<Option<usize>> = boundary
        .iter()
        .map(|&v| {
            let c = &clusters[cluster_of[v]];
            let up = if c.ub == v { t.parent(v) } else { Some(c.ub) };
            up.map(|p| boundary_index[p] as usize)
        })
        .collect();
    let cluster_tree = RootedForest::new(&s_parents, &[]).expect("cluster tree is a tree");
    Ok(ClusterDecomposition { k, clusters, cluster_of, boundary_index, boundary, cluster_tree })
}
