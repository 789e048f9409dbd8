use crate::forest::RootedForest;

/// Partitions any forest into connected parts, growing parts bottom-up and closing
/// a part once it reaches `k` vertices.
///
/// Each part either contains a root of `f` and has fewer than `k` vertices, or has
/// at least `k` vertices and removing its top vertex leaves pieces smaller than `k`.
/// Parts are listed with their top vertex first, in closing order.
pub fn alt_partition(f: &RootedForest, k: usize) -> Vec<Vec<usize>> {
    let n = f.len();
    let mut size = vec![0usize; n];
    let mut merged = vec![false; n];
    let order = f.preorder();
    for &v in order.iter().rev() {
        size[v] = 1;
        for &c in f.children(v) {
            if size[c] < k {
                size[v] += size[c];
                merged[c] = true;
            }
        }
    }
    let mut part_of = vec![usize::MAX; n];
    let mut parts: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        if merged[v] {
            let p = part_of[f.parent(v).expect("merged vertex has a parent")];
            part_of[v] = p;
            parts[p].push(v);
        } else {
            part_of[v] = parts.len();
            parts.push(vec![v]);
        }
    }
    parts.sort_by_key(|p| std::cmp::Reverse(f.pre(p[0])));
    parts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_is_one_part() {
        let p: Vec<Option<usize>> = (0..10).map(|v| (v > 0).then_some(0)).collect();
        let f = RootedForest::new(&p, &[]).unwrap();
        let parts = alt_partition(&f, 3);
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].len(), 10);
    }

    #[test]
    fn single_vertex() {
        let f = RootedForest::new(&[None], &[]).unwrap();
        assert_eq!(alt_partition(&f, 5), vec![vec![0]]);
    }

    #[test]
    fn path_of_five() {
        let p: Vec<Option<usize>> = (0..5).map(|v: usize| v.checked_sub(1)).collect();
        let f = RootedForest::new(&p, &[]).unwrap();
        assert_eq!(alt_partition(&f, 2), vec![vec![3, 4], vec![1, 2], vec![0]]);
    }
}
