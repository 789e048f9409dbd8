use dforest::clustering::{binarize, decompose};
use dforest::connectivity::DecrementalConnectivity;
use dforest::group::IntGroup;
use dforest::oracle::{gen_instance, gen_random_tree, random_weights, NaiveForest, OpMix, Shape};
use dforest::structures;
use dforest::subtree::PackedCounters;
use dforest::trace::{replay, Op, Trace};
use dforest::workloads::block_partial_sum;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn shape() -> impl Strategy<Value = Shape> {
    prop::sample::select(Shape::ALL.to_vec())
}

fn agrees(name: &str, n: usize, m: usize, shape: Shape, mix: &OpMix, seed: u64) -> Result<(), TestCaseError> {
    let g = gen_instance(n, m, shape, mix, seed);
    let f = g.trace.forest().unwrap();
    let mut s = structures::build(name, &f, &g.trace.weights).unwrap();
    let report = replay(&g.trace, s.as_mut(), true).unwrap();
    prop_assert!(report.mismatches.is_empty(), "{name} n={n} m={m} {shape:?} seed={seed}: {:?}", report.mismatches[0]);
    Ok(())
}

proptest! {
    #[test]
    fn tree_sum_structures_agree_with_oracle(n in 1usize..96, m in 0usize..192, shape in shape(), seed in any::<u64>()) {
        for name in ["simple", "iterated:1", "iterated:2", "iterated:3", "iterated"] {
            agrees(name, n, m, shape, &OpMix::TREE_SUM, seed)?;
        }
    }

    #[test]
    fn size_structures_agree_with_oracle(n in 1usize..96, m in 0usize..192, shape in shape(), seed in any::<u64>()) {
        agrees("linear01", n, m, shape, &OpMix::TREE_SIZE, seed)?;
        agrees("subtree", n, m, shape, &OpMix::SUBTREE_SIZE, seed)?;
    }

    #[test]
    fn universal_agrees_with_oracle(n in 1usize..48, m in 0usize..96, shape in shape(), seed in any::<u64>()) {
        agrees("universal", n, m, shape, &OpMix::TREE_SUM, seed)?;
    }

    #[test]
    fn connectivity_matches_naive(n in 1usize..80, shape in shape(), seed in any::<u64>(), order_seed in any::<u64>()) {
        let f = gen_random_tree(n, seed, shape);
        let mut dc = DecrementalConnectivity::new(&f);
        let mut naive = NaiveForest::new(&f, vec![0; n], IntGroup);
        let mut cuts: Vec<usize> = (0..n).filter(|&v| f.parent(v).is_some()).collect();
        cuts.shuffle(&mut dforest::oracle::rng(order_seed));
        for v in cuts {
            dc.cut(v).unwrap();
            naive.cut(v).unwrap();
            for u in 0..n {
                prop_assert_eq!(dc.root(u).unwrap(), naive.root(u));
                let x = (u * 7 + v) % n;
                prop_assert_eq!(dc.connected(u, x).unwrap(), naive.connected(u, x));
                prop_assert_eq!(dc.ancestor(u, x).unwrap(), naive.ancestor(u, x));
            }
        }
    }

    #[test]
    fn binarize_preserves_sums(n in 1usize..80, shape in shape(), seed in any::<u64>()) {
        let f = gen_random_tree(n, seed, shape);
        let w = random_weights(n, -20, 20, seed);
        let b = binarize(&f, &w, 0);
        prop_assert!((0..b.forest.len()).all(|v| b.forest.children(v).len() <= 2));
        let orig = NaiveForest::new(&f, w, IntGroup);
        let bin = NaiveForest::new(&b.forest, b.weights.clone(), IntGroup);
        for v in 0..n {
            prop_assert_eq!(orig.tree_sum(v).unwrap(), bin.tree_sum(v).unwrap());
            prop_assert_eq!(orig.subtree_sum(v).unwrap(), bin.subtree_sum(v).unwrap());
        }
    }

    #[test]
    fn decomposition_partitions_within_bounds(n in 1usize..300, seed in any::<u64>(), k in 1usize..40) {
        let f = gen_random_tree(n, seed, Shape::UniformAttachment);
        let b = binarize(&f, &vec![0i64; n], 0);
        let nb = b.forest.len();
        let k = k.min(nb);
        let d = decompose(&b.forest, k).unwrap();
        let mut seen = vec![false; nb];
        for c in &d.clusters {
            prop_assert!(c.len() <= k);
            for &v in &c.vertices {
                prop_assert!(!seen[v]);
                seen[v] = true;
            }
        }
        prop_assert!(seen.iter().all(|&x| x));
        prop_assert!(d.len() * k <= 6 * nb);
    }

    #[test]
    fn packed_counters_round_trip(values in prop::collection::vec(0u32..=6, 1..=6)) {
        let k = values.len();
        let values: Vec<u32> = values.into_iter().map(|x| x.min(k as u32)).collect();
        let p = PackedCounters::pack(&values);
        prop_assert_eq!(p.unpack(), values);
    }

    #[test]
    fn trace_text_round_trips(n in 1usize..40, m in 0usize..60, shape in shape(), seed in any::<u64>()) {
        let g = gen_instance(n, m, shape, &OpMix::ALL, seed);
        prop_assert_eq!(Trace::parse(&g.trace.format()).unwrap(), g.trace.clone());
        prop_assert_eq!(Trace::parse(&g.trace.without_expected().format()).unwrap().ops.len(), g.trace.ops.len());
        prop_assert!(g.trace.ops.iter().all(|op| !matches!(op, Op::Cut(v) if *v >= n)));
    }

    #[test]
    fn block_sums_equal_recount(b in prop::collection::vec(-100i64..100, 1..100), xs in prop::collection::vec(-100i64..100, 100)) {
        let mut h = block_partial_sum(&b);
        let mut cur = b.clone();
        for p in 0..b.len() {
            h.update(p, xs[p]).unwrap();
            cur[p] = xs[p];
            let mut s = 0;
            for (i, x) in cur.iter().enumerate() {
                s += x;
                prop_assert_eq!(h.query(i).unwrap(), s);
            }
        }
    }
}
