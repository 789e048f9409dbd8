//! Benchmark suites, fuzzing and forest enumeration behind the `dforest` binary.

use std::io::Write;
use std::ops::Range;
use std::str::FromStr;
use std::time::Instant;

use dforest::oracle::{gen_instance, gen_random_tree, random_weights, rng, NaiveForest, Shape};
use dforest::structures::{self, mix_for};
use dforest::trace::{replay, ForestStructure, Op, Trace};
use dforest::workloads::{parity_workload, spine_workload};
use dforest::group::IntGroup;
use dforest::{probe, Error, Result, RootedForest};
use rand::seq::SliceRandom;
use rand::Rng;

pub const CSV_HEADER: [&str; 9] = ["structure", "n", "m", "seed", "shape", "wall_ns", "adds", "subs", "probes"];

/// One benchmark run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRecord {
    pub structure: String,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub shape: String,
    pub wall_ns: u128,
    pub adds: u64,
    pub subs: u64,
    pub probes: u64,
}

impl BenchRecord {
    pub fn fields(&self) -> [String; 9] {
        [
            self.structure.clone(),
            self.n.to_string(),
            self.m.to_string(),
            self.seed.to_string(),
            self.shape.clone(),
            self.wall_ns.to_string(),
            self.adds.to_string(),
            self.subs.to_string(),
            self.probes.to_string(),
        ]
    }
}

pub fn write_csv<W: Write>(out: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        w.write_record(r.fields()).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Balanced tree, every edge cut in random order, one query after each cut and
    /// one before the first.
    Teardown,
    /// Uniform random tree with `2n` random operations legal for the structure.
    Mixed,
    /// Spine construction of base size `size`, unit weights.
    Spine,
    /// Parity construction on `size` bits.
    Parity,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "teardown" => Ok(Suite::Teardown),
            "mixed" => Ok(Suite::Mixed),
            "spine" => Ok(Suite::Spine),
            "parity" => Ok(Suite::Parity),
            _ => Err(format!("unknown suite `{s}`; expected teardown, mixed, spine or parity")),
        }
    }
}

impl Suite {
    pub fn default_structure(&self) -> &'static str {
        match self {
            Suite::Teardown | Suite::Mixed => "simple",
            Suite::Spine | Suite::Parity => "subtree",
        }
    }
}

/// The trace a suite runs for `structure` at `size`, and the shape name recorded.
pub fn suite_trace(suite: Suite, structure: &str, size: usize, seed: u64) -> Result<(Trace, String)> {
    if size == 0 {
        return Err(Error::ValueOutOfRange { value: 0, lo: 1, hi: i64::MAX });
    }
    Ok(match suite {
        Suite::Teardown => (teardown_trace(structure, size, seed), Shape::Balanced.name().to_string()),
        Suite::Mixed => {
            let shape = Shape::UniformAttachment;
            (gen_instance(size, 2 * size, shape, &mix_for(structure), seed).trace, shape.name().to_string())
        }
        Suite::Spine => (spine_workload(size, seed, true)?.trace, "spine".to_string()),
        Suite::Parity => (parity_workload(size, seed)?.trace, "parity".to_string()),
    })
}

fn teardown_trace(structure: &str, n: usize, seed: u64) -> Trace {
    let mix = mix_for(structure);
    let f = gen_random_tree(n, seed, Shape::Balanced);
    let w = random_weights(n, mix.weight_lo.max(0), mix.weight_hi.min(1000), seed);
    let mut naive = NaiveForest::new(&f, w.clone(), IntGroup);
    let mut trace = Trace::new(&f, w);
    let mut r = rng(seed.wrapping_add(1));
    let mut order: Vec<usize> = (1..n).collect();
    order.shuffle(&mut r);
    let subtree = mix.tree_sum == 0;
    trace.ops.push(random_query(&naive, subtree, &mut r));
    for v in order {
        naive.cut(v).expect("each edge is cut once");
        trace.ops.push(Op::Cut(v));
        trace.ops.push(random_query(&naive, subtree, &mut r));
    }
    trace
}

fn random_query(naive: &NaiveForest<IntGroup>, subtree: bool, r: &mut impl Rng) -> Op {
    let v = r.gen_range(0..naive.len());
    if subtree {
        Op::SubtreeSum(v, naive.subtree_sum(v).ok())
    } else {
        Op::TreeSum(v, naive.tree_sum(v).ok())
    }
}

/// Builds `structure` on the trace's forest and replays it. Group operations and
/// probes include construction but not the shared lookup tables, which a first
/// throwaway build fills.
pub fn measure(structure: &str, trace: &Trace, seed: u64, shape: &str) -> Result<BenchRecord> {
    let f = trace.forest()?;
    drop(structures::build(structure, &f, &trace.weights)?);
    probe::reset();
    let start = Instant::now();
    let mut s = structures::build(structure, &f, &trace.weights)?;
    replay(trace, s.as_mut(), false)?;
    let wall_ns = start.elapsed().as_nanos();
    let probes = probe::get();
    let ops = s.group_ops();
    Ok(BenchRecord {
        structure: structure.to_string(),
        n: trace.len(),
        m: trace.ops.len(),
        seed,
        shape: shape.to_string(),
        wall_ns,
        adds: ops.adds,
        subs: ops.subs,
        probes,
    })
}

pub fn bench(suite: Suite, structures: &[String], sizes: &[usize], seed: u64) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::new();
    for name in structures {
        for &size in sizes {
            let (trace, shape) = suite_trace(suite, name, size, seed)?;
            out.push(measure(name, &trace, seed, &shape)?);
        }
    }
    Ok(out)
}

/// A seed on which a structure disagreed with the oracle or failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub structure: String,
    pub seed: u64,
    pub shape: Shape,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub n: usize,
    pub m: usize,
    pub seeds: Range<u64>,
    pub structures: Vec<String>,
    pub threads: usize,
}

/// Shape used for a fuzz seed.
pub fn fuzz_shape(seed: u64) -> Shape {
    Shape::ALL[(seed % Shape::ALL.len() as u64) as usize]
}

/// Replays one generated trace; `None` when every answer matched.
pub fn fuzz_one(structure: &str, n: usize, m: usize, seed: u64) -> Option<Finding> {
    let shape = fuzz_shape(seed);
    let g = gen_instance(n, m, shape, &mix_for(structure), seed);
    let finding = |detail: String| Some(Finding { structure: structure.to_string(), seed, shape, detail });
    let f = match g.trace.forest() {
        Ok(f) => f,
        Err(e) => return finding(e.to_string()),
    };
    let mut s: Box<dyn ForestStructure + Send> = match structures::build(structure, &f, &g.trace.weights) {
        Ok(s) => s,
        Err(e) => return finding(format!("construction failed: {e}")),
    };
    match replay(&g.trace, s.as_mut(), true) {
        Ok(r) => r
            .mismatches
            .first()
            .and_then(|x| finding(format!("op {}: expected {}, got {}", x.index, x.expected, x.got))),
        Err(e) => finding(e.to_string()),
    }
}

/// All findings, sorted by structure order then seed. Seeds are split across
/// `threads` workers.
pub fn fuzz(cfg: &FuzzConfig) -> Vec<Finding> {
    let threads = cfg.threads.max(1);
    let seeds: Vec<u64> = cfg.seeds.clone().collect();
    let chunk = seeds.len().div_ceil(threads).max(1);
    let mut findings: Vec<Finding> = std::thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    for name in &cfg.structures {
                        out.extend(part.iter().filter_map(|&seed| fuzz_one(name, cfg.n, cfg.m, seed)));
                    }
                    out
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("fuzz worker panicked")).collect()
    });
    let rank = |s: &str| cfg.structures.iter().position(|x| x == s);
    findings.sort_by_key(|f| (rank(&f.structure), f.seed));
    findings
}

/// Every forest on `n` vertices whose parents precede their children.
pub fn increasing_forests(n: usize) -> Vec<RootedForest> {
    let mut out = Vec::new();
    let mut parents: Vec<Option<usize>> = Vec::with_capacity(n);
    fn rec(n: usize, parents: &mut Vec<Option<usize>>, out: &mut Vec<RootedForest>) {
        let v = parents.len();
        if v == n {
            out.push(RootedForest::new(parents, &[]).expect("parents precede children"));
            return;
        }
        for p in std::iter::once(None).chain((0..v).map(Some)) {
            parents.push(p);
            rec(n, parents, out);
            parents.pop();
        }
    }
    rec(n, &mut parents, &mut out);
    out
}

/// Parses `a..b` or a single seed `a`.
pub fn parse_seed_range(s: &str) -> std::result::Result<Range<u64>, String> {
    let bad = || format!("invalid seed range `{s}`; expected `a..b`");
    match s.split_once("..") {
        Some((a, b)) => {
            let a: u64 = a.parse().map_err(|_| bad())?;
            let b: u64 = b.parse().map_err(|_| bad())?;
            if a > b {
                return Err(bad());
            }
            Ok(a..b)
        }
        None => {
            let a: u64 = s.parse().map_err(|_| bad())?;
            Ok(a..a + 1)
        }
    }
}
