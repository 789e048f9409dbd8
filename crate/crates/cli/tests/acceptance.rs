//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::process::Command;
use std::time::Instant;

use dforest::clustering::{binarize, decompose};
use dforest::group::{Instrumented, IntGroup};
use dforest::optimal::{check_correct, search_optimal, structure_to_tree};
use dforest::oracle::{gen_instance, gen_random_tree, random_weights, rng, NaiveForest, Shape};
use dforest::structures::{self, mix_for};
use dforest::subtree::{build_q_table, PackedCounters};
use dforest::trace::replay;
use dforest::tree_size::{build_global_table, ForestCode};
use dforest::tree_sum::SimpleTreeSum;
use dforest::workloads::{build_spine, parity_workload, ParityInstance};
use dforest::RootedForest;
use dforest_cli::{measure, suite_trace, Suite};
use rand::seq::SliceRandom;
use rand::Rng;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn threads() -> usize {
    std::thread::available_parallelism().map_or(4, |x| x.get())
}

/// Runs `f` on every seed in `0..seeds` across worker threads; first error wins.
fn par_seeds(seeds: u64, f: impl Fn(u64) -> std::result::Result<(), String> + Sync) -> std::result::Result<(), String> {
    let t = threads() as u64;
    let errors: Vec<String> = std::thread::scope(|s| {
        let f = &f;
        let hs: Vec<_> = (0..t)
            .map(|w| s.spawn(move || (w..seeds).step_by(t as usize).find_map(|seed| f(seed).err())))
            .collect();
        hs.into_iter().filter_map(|h| h.join().expect("worker panicked")).collect()
    });
    errors.into_iter().next().map_or(Ok(()), Err)
}

fn oracle_equivalence() -> Check {
    let names = ["simple", "iterated:1", "iterated:2", "iterated:3", "iterated:4", "linear01", "subtree", "universal"];
    for name in names {
        par_seeds(10_000, |seed| {
            let n = 1 + (seed as usize * 7 + 3) % 128;
            let m = 1 + (seed as usize * 131) % 512;
            let shape = Shape::ALL[seed as usize % Shape::ALL.len()];
            let g = gen_instance(n, m, shape, &mix_for(name), seed);
            let f = g.trace.forest().map_err(|e| e.to_string())?;
            let mut s = structures::build(name, &f, &g.trace.weights).map_err(|e| format!("{name} seed {seed}: {e}"))?;
            let r = replay(&g.trace, s.as_mut(), true).map_err(|e| format!("{name} seed {seed}: {e}"))?;
            ensure(r.mismatches.is_empty(), || format!("{name} seed {seed}: {:?}", r.mismatches[0]))
        })?;
    }
    Ok(format!("{} structures x 10000 traces identical to the oracle", names.len()))
}

fn exact_counting() -> Check {
    let mut worst: f64 = 0.0;
    for e in 10..=14 {
        let n = 1usize << e;
        let f = gen_random_tree(n, e as u64, Shape::Balanced);
        let g = Instrumented::new(IntGroup);
        let mut s = SimpleTreeSum::new(&f, random_weights(n, -100, 100, 1), g.clone());
        let mut r = rng(e as u64);
        let mut order: Vec<usize> = (1..n).collect();
        order.shuffle(&mut r);
        let mut cut_ops = 0;
        for v in order {
            let before = g.counts().total();
            s.tree_sum(r.gen_range(0..n)).map_err(|e| e.to_string())?;
            ensure(g.counts().total() == before, || format!("n={n}: tree_sum used group ops"))?;
            s.update_weight(r.gen_range(0..n), r.gen_range(-100..100)).map_err(|e| e.to_string())?;
            ensure(g.counts().total() == before + 2, || format!("n={n}: update used {} ops", g.counts().total() - before))?;
            let before = g.counts().total();
            s.cut(v).map_err(|e| e.to_string())?;
            cut_ops += g.counts().total() - before;
        }
        let bound = 2 * n as u64 * e as u64;
        ensure(cut_ops <= bound, || format!("n={n}: cuts used {cut_ops} > {bound}"))?;
        worst = worst.max(cut_ops as f64 / bound as f64);
    }
    Ok(format!("0 per query, 2 per update; cut total at most {:.3} of 2n log n", worst))
}

fn cluster_bounds() -> Check {
    let mut r = rng(33);
    for seed in 0..1000u64 {
        let n0 = r.gen_range(2..2000);
        let shape = [Shape::UniformAttachment, Shape::Path, Shape::Caterpillar, Shape::Balanced, Shape::Star][seed as usize % 5];
        let f = gen_random_tree(n0, seed, shape);
        let b = binarize(&f, &vec![0i64; n0], 0);
        let n = b.forest.len();
        let log = (usize::BITS - (n - 1).leading_zeros()) as usize;
        for k in [2, log.max(1), n] {
            let d = decompose(&b.forest, k).map_err(|e| e.to_string())?;
            ensure(d.len() * k <= 6 * n, || format!("seed {seed} n={n} k={k}: {} clusters", d.len()))?;
            ensure(d.clusters.iter().all(|c| c.len() <= k), || format!("seed {seed} n={n} k={k}: oversized cluster"))?;
        }
    }
    Ok("1000 binarized trees, k in {2, log n, n}".into())
}

fn ladder(structure: &str) -> std::result::Result<Vec<(usize, usize, f64)>, String> {
    (10..=14)
        .map(|e| {
            let (t, shape) = suite_trace(Suite::Teardown, structure, 1 << e, 1).map_err(|e| e.to_string())?;
            let rec = measure(structure, &t, 1, &shape).map_err(|e| e.to_string())?;
            Ok((rec.n, rec.m, rec.probes as f64))
        })
        .collect()
}

fn linearity() -> Check {
    let l = ladder("linear01")?;
    let ratios: Vec<f64> = l.windows(2).map(|w| w[1].2 / w[0].2).collect();
    ensure(ratios.iter().all(|r| (1.5..=2.5).contains(r)), || format!("doubling ratios {ratios:.3?}"))?;
    Ok(format!("doubling ratios {ratios:.3?}"))
}

fn subtree_growth() -> Check {
    let l = ladder("subtree")?;
    let curve = |n: usize, m: usize| {
        let lg = (n as f64).log2();
        (n + m) as f64 * lg / lg.log2()
    };
    let mut rel = Vec::new();
    for w in l.windows(2) {
        let observed = w[1].2 / w[0].2;
        let expected = curve(w[1].0, w[1].1) / curve(w[0].0, w[0].1);
        rel.push(observed / expected);
    }
    ensure(rel.iter().all(|r| (0.7..=1.3).contains(r)), || format!("observed/expected ratios {rel:.3?}"))?;
    Ok(format!("observed/expected ratios {rel:.3?}"))
}

fn micro_tables() -> Check {
    let mut checked = 0u64;
    for ell in 1..=4usize {
        let t = build_global_table(ell).map_err(|e| e.to_string())?;
        for code in 0..t.slots() as u32 {
            let Some((parents, weights)) = (ForestCode { ell, bits: code as u64 }).decode() else {
                ensure(!t.is_valid(code), || format!("ℓ={ell}: invalid code {code} marked valid"))?;
                continue;
            };
            let f = RootedForest::new(&parents, &[]).map_err(|e| e.to_string())?;
            let naive = NaiveForest::new(&f, weights.iter().map(|&b| b as i64).collect(), IntGroup);
            for v in 0..ell {
                checked += 1;
                ensure(t.tree_sum(code, v) as i64 == naive.tree_sum(v).unwrap(), || format!("ℓ={ell} code {code} sum {v}"))?;
                for bit in [false, true] {
                    let mut w2 = weights.clone();
                    w2[v] = bit as u8;
                    let want = ForestCode::encode(&parents, &w2).unwrap().bits;
                    ensure(t.set_weight(code, v, bit) as u64 == want, || format!("ℓ={ell} code {code} set {v}"))?;
                }
                let mut p2 = parents.clone();
                p2[v] = None;
                ensure(t.cut(code, v) as u64 == ForestCode::encode(&p2, &weights).unwrap().bits, || {
                    format!("ℓ={ell} code {code} cut {v}")
                })?;
            }
        }
    }
    let mut entries = 0u64;
    for k in 1..=4usize {
        let q = build_q_table(k).map_err(|e| e.to_string())?;
        let rows = (k + 1).pow(k as u32);
        for row in 0..rows {
            let counters: Vec<u32> = (0..k).map(|i| (row / (k + 1).pow(i as u32) % (k + 1)) as u32).collect();
            let b = PackedCounters::pack(&counters);
            for u in 0..1u64 << k {
                entries += 1;
                let sum: u32 = (0..k).filter(|&i| u >> i & 1 == 1).map(|i| counters[i]).sum();
                ensure(q.get(b, u) as u32 == sum, || format!("k={k} {counters:?} subset {u:b}"))?;
            }
        }
    }
    Ok(format!("{checked} size-table states x all ops, {entries} Q entries"))
}

fn computation_trees() -> Check {
    let forest = |p: &[Option<usize>]| RootedForest::new(p, &[]).unwrap();
    let cases = [(forest(&[None]), 0), (forest(&[None, Some(0)]), 1), (forest(&[None, None]), 0)];
    for (f, want) in &cases {
        let got = search_optimal(f, 1, 4).map_err(|e| e.to_string())?.mid;
        ensure(got == *want, || format!("{:?}: MID {got}, expected {want}", f.parents()))?;
        let brute = support::syntactic::min_mid(f, 1, 3);
        ensure(brute == Some(*want), || format!("{:?}: brute force gives {brute:?}", f.parents()))?;
    }
    let mut witnesses = Vec::new();
    for p in [vec![None, Some(0)], vec![None, Some(0), Some(0)], vec![None, Some(0), Some(1)], vec![None, None, Some(1)]] {
        let f = forest(&p);
        for m in 1..=2 {
            witnesses.push((f.clone(), search_optimal(&f, m, 4).map_err(|e| e.to_string())?.witness));
        }
        witnesses.push((f.clone(), structure_to_tree(&support::simple_factory, &f, 1).map_err(|e| e.to_string())?));
    }
    let (mut non_equivalent, mut killed) = (0usize, 0usize);
    for (i, (f, c)) in witnesses.iter().enumerate() {
        for (j, m) in support::mutants(c, f.len()).iter().enumerate() {
            if support::differ(c, m, f, (i * 10_000 + j) as u64) {
                non_equivalent += 1;
                killed += !check_correct(m, f, m.height) as usize;
            }
        }
    }
    let rate = killed as f64 / non_equivalent as f64;
    ensure(rate >= 0.95, || format!("kill rate {rate:.3}"))?;
    let ratio = support::adaptive_path_ratio(3)?;
    ensure(ratio <= 4.0, || format!("adaptive ratio {ratio:.3} > 4"))?;
    Ok(format!("MIDs 0/1/0; kill rate {rate:.3} ({killed}/{non_equivalent}); adaptive ratio {ratio:.3}"))
}

fn spine() -> Check {
    let mut checks = 0;
    for np in [2usize, 4, 8, 16] {
        let mut r = rng(np as u64);
        let a: Vec<i64> = (0..np).map(|_| r.gen_range(0..np as i64)).collect();
        let mut inst = build_spine(np, &a).map_err(|e| e.to_string())?;
        let mut naive = NaiveForest::new(inst.forest(), inst.weights().to_vec(), IntGroup);
        let n = np as i64;
        for k in 0..np {
            let kk = k as i64 + 1;
            ensure(naive.subtree_sum(inst.v_plus(k)).unwrap() == 4 * kk * n * (8 * n + 1), || format!("n'={np}: ssum(v+[{k}])"))?;
            ensure(naive.subtree_sum(inst.v_minus(k)).unwrap() == kk * n, || format!("n'={np}: ssum(v-[{k}])"))?;
        }
        let mut cur = a.clone();
        let mut order: Vec<usize> = (0..np).collect();
        for p in 0..np {
            order.shuffle(&mut r);
            for &i in &order {
                let value = r.gen_range(0..n);
                let c = inst.translate_update(p, i, value, &mut r).map_err(|e| e.to_string())?;
                for v in c.cuts {
                    naive.cut(v).map_err(|e| e.to_string())?;
                }
                cur[i] = value;
                let mut prefix = 0;
                for k in 0..np {
                    prefix += cur[k];
                    let got = naive.subtree_sum(inst.v_plus(k)).unwrap() - 7 * n * naive.subtree_sum(inst.v_minus(k)).unwrap() + inst.b()[k];
                    ensure(got == prefix, || format!("n'={np} epoch {p} k={k}: {got} != {prefix}"))?;
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} prefix equalities after translated updates"))
}

fn parity() -> Check {
    par_seeds(1000, |seed| {
        let np = 1 + (seed as usize * 7919) % 64;
        let w = parity_workload(np, seed).map_err(|e| e.to_string())?;
        let f = w.trace.forest().map_err(|e| e.to_string())?;
        let mut s = structures::build("subtree", &f, &w.trace.weights).map_err(|e| e.to_string())?;
        let r = replay(&w.trace, s.as_mut(), true).map_err(|e| e.to_string())?;
        let got: Vec<bool> = r.answers.iter().map(|&(_, x)| ParityInstance::parity(x)).collect();
        ensure(r.mismatches.is_empty() && got == w.expected_parity, || format!("seed {seed}"))
    })?;
    Ok("1000 runs, n' <= 64".into())
}

fn cli_end_to_end() -> Check {
    let bin = env!("CARGO_BIN_EXE_dforest");
    let o = Command::new(bin)
        .args(["fuzz", "--n", "64", "--m", "256", "--seeds", "0..1000", "--structures", "fixture-offbyone"])
        .output()
        .map_err(|e| e.to_string())?;
    let out = String::from_utf8_lossy(&o.stdout).into_owned();
    ensure(o.status.code() == Some(1) && out.contains("first seed"), || format!("fuzz did not flag the fixture: {out}"))?;
    let dir = std::env::temp_dir().join(format!("dforest-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let names = ["simple", "iterated:1", "iterated:2", "iterated:3", "iterated:4", "linear01", "subtree", "universal"];
    for name in names {
        let g = gen_instance(100, 300, Shape::UniformAttachment, &mix_for(name), 4);
        let p = dir.join("t.trace");
        std::fs::write(&p, g.trace.format()).map_err(|e| e.to_string())?;
        let o = Command::new(bin).arg("run").arg(&p).args(["--structure", name]).output().map_err(|e| e.to_string())?;
        ensure(o.status.code() == Some(0), || format!("run --structure {name} exited {:?}", o.status.code()))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("fixture flagged; run exits 0 for {} structures", names.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("exact counting", exact_counting),
        ("cluster decomposition bounds", cluster_bounds),
        ("linearity ratio", linearity),
        ("subtree-size growth", subtree_growth),
        ("micro-table exhaustiveness", micro_tables),
        ("computation trees", computation_trees),
        ("spine workload invariant", spine),
        ("parity workload", parity),
        ("end-to-end cli", cli_end_to_end),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
