use std::collections::BTreeSet;

use dforest::group::IntGroup;
use dforest::oracle::{rng, NaiveForest};
use dforest::structures;
use dforest::trace::replay;
use dforest::workloads::{block_partial_sum, build_parity, build_spine, parity_workload, spine_workload, ParityInstance};
use dforest::Error;
use rand::seq::SliceRandom;
use rand::Rng;

fn check_spine_equality(n_prime: usize, seed: u64) {
    let mut r = rng(seed);
    let a: Vec<i64> = (0..n_prime).map(|_| r.gen_range(0..n_prime as i64)).collect();
    let mut inst = build_spine(n_prime, &a).unwrap();
    let np = n_prime as i64;
    assert_eq!(inst.forest().len(), n_prime * (9 * n_prime + 2));
    let mut naive = NaiveForest::new(inst.forest(), inst.weights().to_vec(), IntGroup);
    for k in 0..n_prime {
        let kk = k as i64 + 1;
        assert_eq!(naive.subtree_sum(inst.v_plus(k)).unwrap(), 4 * kk * np * (8 * np + 1));
        assert_eq!(naive.subtree_sum(inst.v_minus(k)).unwrap(), kk * np);
    }
    let mut current = a.clone();
    let check = |inst: &dforest::workloads::SpineInstance, naive: &NaiveForest<IntGroup>, current: &[i64]| {
        let mut prefix = 0;
        for k in 0..n_prime {
            prefix += current[k];
            let plus = naive.subtree_sum(inst.v_plus(k)).unwrap();
            let minus = naive.subtree_sum(inst.v_minus(k)).unwrap();
            assert_eq!(plus - 7 * np * minus + inst.b()[k], prefix, "n'={n_prime} seed={seed} k={k}");
        }
    };
    check(&inst, &naive, &current);
    let mut order: Vec<usize> = (0..n_prime).collect();
    for p in 0..n_prime {
        order.shuffle(&mut r);
        for &i in &order {
            let value = r.gen_range(0..np);
            let c = inst.translate_update(p, i, value, &mut r).unwrap();
            assert_eq!((c.j1 + c.j2) as i64, 7 * np - (value - current[i]));
            for v in c.cuts {
                naive.cut(v).unwrap();
            }
            current[i] = value;
            check(&inst, &naive, &current);
        }
    }
}

#[test]
fn spine_equality_holds_over_all_epochs() {
    for n_prime in [2, 4, 8, 16] {
        for seed in 0..3 {
            check_spine_equality(n_prime, seed);
        }
    }
}

#[test]
fn spine_small_example_pairs() {
    // n' = 2, delta = +1: s = 13, j in 1..=6 with 13 - j in 1..=16.
    let all: BTreeSet<(usize, usize)> = (1..=6).filter(|j| 13 - j <= 16).map(|j| (j, 13 - j)).collect();
    let mut seen = BTreeSet::new();
    for seed in 0..200 {
        let mut inst = build_spine(2, &[0, 0]).unwrap();
        let c = inst.translate_update(0, 0, 1, &mut rng(seed)).unwrap();
        assert!(all.contains(&(c.j1, c.j2)));
        seen.insert((c.j1, c.j2));
    }
    assert!(seen.contains(&(5, 8)) && seen.contains(&(6, 7)));
    let mut inst = build_spine(2, &[1, 1]).unwrap();
    let c = inst.translate_update(0, 1, 1, &mut rng(0)).unwrap();
    assert_eq!(c.j1 + c.j2, 14);
}

#[test]
fn sampler_needs_few_tries() {
    let mut samples = 0;
    let mut tries = 0.0;
    let mut seed = 0;
    while samples < 100_000 {
        let n_prime = [2, 4, 8, 16, 32][seed as usize % 5];
        let mut r = rng(seed);
        let a: Vec<i64> = (0..n_prime).map(|_| r.gen_range(0..n_prime as i64)).collect();
        let mut inst = build_spine(n_prime, &a).unwrap();
        for p in 0..n_prime {
            for i in 0..n_prime {
                inst.translate_update(p, i, r.gen_range(0..n_prime as i64), &mut r).unwrap();
            }
        }
        let s = n_prime * n_prime;
        tries += inst.mean_tries() * s as f64;
        samples += s;
        seed += 1;
    }
    let mean = tries / samples as f64;
    assert!(mean <= 3.0, "mean tries {mean}");
}

#[test]
fn spine_workload_on_subtree_structure() {
    for n_prime in [2, 4, 6] {
        let w = spine_workload(n_prime, 7, true).unwrap();
        let f = w.trace.forest().unwrap();
        let mut s = structures::build("subtree", &f, &w.trace.weights).unwrap();
        let report = replay(&w.trace, s.as_mut(), true).unwrap();
        assert!(report.mismatches.is_empty());
        let weighted = spine_workload(n_prime, 7, false).unwrap();
        assert_eq!(weighted.prefix_sums, w.prefix_sums);
    }
}

#[test]
fn parity_examples_and_errors() {
    let mut p = build_parity(&[false, true]).unwrap();
    let mut naive = NaiveForest::new(p.forest(), p.weights(), IntGroup);
    assert!(ParityInstance::parity(naive.subtree_sum(p.query_vertex(1)).unwrap()));
    naive.cut(p.flip(1).unwrap().vertex()).unwrap();
    assert!(!ParityInstance::parity(naive.subtree_sum(p.query_vertex(1)).unwrap()));
    assert_eq!(p.flip(1), Err(Error::DoubleFlip(1)));
}

#[test]
fn parity_matches_recount() {
    for seed in 0..1000 {
        let n_prime = 1 + (seed as usize * 7919) % 64;
        let w = parity_workload(n_prime, seed).unwrap();
        let f = w.trace.forest().unwrap();
        let mut s = structures::build("subtree", &f, &w.trace.weights).unwrap();
        let report = replay(&w.trace, s.as_mut(), true).unwrap();
        assert!(report.mismatches.is_empty(), "seed {seed}");
        let got: Vec<bool> = report.answers.iter().map(|&(_, x)| ParityInstance::parity(x)).collect();
        assert_eq!(got, w.expected_parity, "seed {seed}");
    }
}

#[test]
fn block_sums_match_recount() {
    let mut r = rng(3);
    for _ in 0..200 {
        let s = r.gen_range(1..=100);
        let b0: Vec<i64> = (0..s).map(|_| r.gen_range(-50..50)).collect();
        let mut cur = b0.clone();
        let mut h = block_partial_sum(&b0);
        for i in 0..s {
            assert_eq!(h.query(i).unwrap(), b0[..=i].iter().sum::<i64>());
        }
        for p in 0..s {
            let x = r.gen_range(-50..50);
            h.update(p, x).unwrap();
            cur[p] = x;
            let i = r.gen_range(0..s);
            assert_eq!(h.query(i).unwrap(), cur[..=i].iter().sum::<i64>());
        }
        assert!(matches!(h.update(0, 1), Err(Error::OutOfOrderUpdate { .. })));
    }
}
