use crate::forest::RootedForest;

/// A binary forest equivalent to the input for every legal trace.
#[derive(Debug, Clone)]
pub struct Binarized<W> {
    pub forest: RootedForest,
    pub weights: Vec<W>,
    /// Original vertex for each output vertex; `None` for inserted auxiliary ones.
    /// Original vertices keep their ids, inserted ones follow.
    pub origin: Vec<Option<usize>>,
}

/// Replaces every vertex `v` with `d >= 3` children by a path of `v` and `d - 1`
/// auxiliary zero-weight vertices, each path vertex adopting one child.
pub fn binarize<W: Clone>(f: &RootedForest, weights: &[W], zero: W) -> Binarized<W> {
    let n = f.len();
    assert_eq!(weights.len(), n, "one weight per vertex");
    let mut parents: Vec<Option<usize>> = f.parents().to_vec();
    let mut aux = f.aux_flags().to_vec();
    let mut w = weights.to_vec();
    let mut origin: Vec<Option<usize>> = (0..n).map(Some).collect();
    for v in 0..n {
        let ch = f.children(v);
        if ch.len() < 3 {
            continue;
        }
        let mut holder = v;
        for (i, &c) in ch.iter().enumerate() {
            if i > 0 {
                let a = parents.len();
                parents.push(Some(holder));
                aux.push(true);
                w.push(zero.clone());
                origin.push(None);
                holder = a;
            }
            parents[c] = Some(holder);
        }
    }
    let forest = RootedForest::new(&parents, &aux).expect("binarization keeps the parent relation acyclic");
    Binarized { forest, weights: w, origin }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_children() {
        let f = RootedForest::new(&[None, Some(0), Some(0), Some(0), Some(0)], &[]).unwrap();
        let b = binarize(&f, &[1, 2, 3, 4, 5], 0);
        assert!(b.forest.is_binary());
        assert_eq!(b.forest.len(), 8);
        assert_eq!((5..8).filter(|&v| b.forest.is_aux(v)).count(), 3);
        assert_eq!(&b.weights[5..], &[0, 0, 0]);
        for c in 1..5 {
            assert_eq!(b.origin[c], Some(c));
            assert_eq!(b.forest.children(b.forest.parent(c).unwrap()).iter().filter(|&&x| x < 5).count(), 1);
        }
    }

    #[test]
    fn binary_input_unchanged() {
        let f = RootedForest::new(&[None, Some(0), Some(0), Some(1)], &[false, false, true]).unwrap();
        let b = binarize(&f, &[1, 2, 3, 4], 0);
        assert_eq!(b.forest, f);
        let single = RootedForest::new(&[None], &[]).unwrap();
        assert_eq!(binarize(&single, &[7], 0).forest, single);
    }
}
