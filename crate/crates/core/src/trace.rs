//! Operation traces: a text format, and replay against any structure.
//!
//! ```text
//! init 3
//! parent 1 0
//! parent 2 1
//! weight 0 5
//! tsum 2 5
//! cut 1
//! ```
//!
//! Header lines are `init <n>`, `parent <v> <p|-1>`, `aux <v>` and
//! `weight <v> <int>`; operations are `cut <v>`, `upd <v> <int>`,
//! `tsum <v> [<expected>]` and `ssum <v> [<expected>]`. `#` starts a comment.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::forest::RootedForest;
use crate::group::OpCounts;
use crate::probe;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Cut(usize),
    Update(usize, i64),
    TreeSum(usize, Option<i64>),
    SubtreeSum(usize, Option<i64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Cut,
    Update,
    TreeSum,
    SubtreeSum,
}

impl Op {
    pub fn kind(&self) -> OpKind {
        match self {
            Op::Cut(_) => OpKind::Cut,
            Op::Update(..) => OpKind::Update,
            Op::TreeSum(..) => OpKind::TreeSum,
            Op::SubtreeSum(..) => OpKind::SubtreeSum,
        }
    }

    pub fn vertex(&self) -> usize {
        match *self {
            Op::Cut(v) | Op::Update(v, _) | Op::TreeSum(v, _) | Op::SubtreeSum(v, _) => v,
        }
    }
}

/// An initial weighted forest followed by operations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub parents: Vec<Option<usize>>,
    pub aux: Vec<bool>,
    pub weights: Vec<i64>,
    pub ops: Vec<Op>,
}

impl Trace {
    pub fn new(f: &RootedForest, weights: Vec<i64>) -> Self {
        Trace { parents: f.parents().to_vec(), aux: f.aux_flags().to_vec(), weights, ops: Vec::new() }
    }

    pub fn forest(&self) -> Result<RootedForest> {
        RootedForest::new(&self.parents, &self.aux)
    }

    pub fn len(&self) -> usize {
        self.parents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parents.is_empty()
    }

    /// Copy with every expected answer removed.
    pub fn without_expected(&self) -> Trace {
        let mut t = self.clone();
        for op in &mut t.ops {
            match op {
                Op::TreeSum(_, e) | Op::SubtreeSum(_, e) => *e = None,
                _ => {}
            }
        }
        t
    }

    pub fn parse(text: &str) -> Result<Trace> {
        let mut t: Option<Trace> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let key = it.next().expect("non-empty line has a token");
            let args: Vec<i64> = it
                .map(|s| s.parse::<i64>().map_err(|_| err(format!("bad integer `{s}`"))))
                .collect::<Result<_>>()?;
            let arity = |lo: usize, hi: usize| -> Result<()> {
                if args.len() < lo || args.len() > hi {
                    Err(err(format!("`{key}` takes {lo}..={hi} arguments, got {}", args.len())))
                } else {
                    Ok(())
                }
            };
            if key == "init" {
                arity(1, 1)?;
                if t.is_some() {
                    return Err(err("duplicate `init`".into()));
                }
                let n = usize::try_from(args[0]).map_err(|_| err("negative vertex count".into()))?;
                t = Some(Trace { parents: vec![None; n], aux: vec![false; n], weights: vec![0; n], ops: Vec::new() });
                continue;
            }
            let tr = t.as_mut().ok_or_else(|| err("expected `init` first".into()))?;
            let n = tr.parents.len();
            let vertex = |x: i64| -> Result<usize> {
                usize::try_from(x).ok().filter(|&v| v < n).ok_or_else(|| err(format!("vertex {x} out of range")))
            };
            let header = |tr: &Trace| -> Result<()> {
                if tr.ops.is_empty() {
                    Ok(())
                } else {
                    Err(err(format!("`{key}` after the first operation")))
                }
            };
            match key {
                "parent" => {
                    arity(2, 2)?;
                    header(tr)?;
                    let v = vertex(args[0])?;
                    tr.parents[v] = if args[1] == -1 { None } else { Some(vertex(args[1])?) };
                }
                "aux" => {
                    arity(1, 1)?;
                    header(tr)?;
                    let v = vertex(args[0])?;
                    tr.aux[v] = true;
                }
                "weight" => {
                    arity(2, 2)?;
                    header(tr)?;
                    let v = vertex(args[0])?;
                    tr.weights[v] = args[1];
                }
                "cut" => {
                    arity(1, 1)?;
                    tr.ops.push(Op::Cut(vertex(args[0])?));
                }
                "upd" => {
                    arity(2, 2)?;
                    tr.ops.push(Op::Update(vertex(args[0])?, args[1]));
                }
                "tsum" => {
                    arity(1, 2)?;
                    tr.ops.push(Op::TreeSum(vertex(args[0])?, args.get(1).copied()));
                }
                "ssum" => {
                    arity(1, 2)?;
                    tr.ops.push(Op::SubtreeSum(vertex(args[0])?, args.get(1).copied()));
                }
                _ => return Err(err(format!("unknown record `{key}`"))),
            }
        }
        let t = t.ok_or(Error::Parse { line: 0, msg: "missing `init`".into() })?;
        t.forest().map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
        Ok(t)
    }

    pub fn format(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "init {}", self.len());
        for (v, p) in self.parents.iter().enumerate() {
            if let Some(p) = p {
                let _ = writeln!(s, "parent {v} {p}");
            }
        }
        for (v, &a) in self.aux.iter().enumerate() {
            if a {
                let _ = writeln!(s, "aux {v}");
            }
        }
        for (v, &w) in self.weights.iter().enumerate() {
            if w != 0 {
                let _ = writeln!(s, "weight {v} {w}");
            }
        }
        for op in &self.ops {
            let _ = match *op {
                Op::Cut(v) => writeln!(s, "cut {v}"),
                Op::Update(v, x) => writeln!(s, "upd {v} {x}"),
                Op::TreeSum(v, None) => writeln!(s, "tsum {v}"),
                Op::TreeSum(v, Some(e)) => writeln!(s, "tsum {v} {e}"),
                Op::SubtreeSum(v, None) => writeln!(s, "ssum {v}"),
                Op::SubtreeSum(v, Some(e)) => writeln!(s, "ssum {v} {e}"),
            };
        }
        s
    }
}

/// A structure driven by traces, with integer weights.
pub trait ForestStructure {
    fn supports(&self, kind: OpKind) -> bool;
    fn tree_sum(&mut self, v: usize) -> Result<i64>;
    fn subtree_sum(&mut self, v: usize) -> Result<i64>;
    fn update_weight(&mut self, v: usize, x: i64) -> Result<()>;
    fn cut(&mut self, v: usize) -> Result<()>;
    /// Group operations performed so far; zero for integer-only structures.
    fn group_ops(&self) -> OpCounts {
        OpCounts::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mismatch {
    pub index: usize,
    pub expected: i64,
    pub got: i64,
}

/// Counters observed after one operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Snapshot {
    pub group_ops: OpCounts,
    pub probes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ReplayReport {
    /// `(op index, answer)` for every query.
    pub answers: Vec<(usize, i64)>,
    pub mismatches: Vec<Mismatch>,
    /// Counters after each operation, relative to the start of the replay.
    pub snapshots: Vec<Snapshot>,
}

/// Checks `trace` for legality against its own initial forest.
pub fn check_legal(trace: &Trace) -> Result<()> {
    let mut has_parent: Vec<bool> = trace.parents.iter().map(Option::is_some).collect();
    for (index, op) in trace.ops.iter().enumerate() {
        let v = op.vertex();
        let illegal = |reason: &str| Err(Error::IllegalOperation { index, reason: reason.to_string() });
        if v >= trace.len() {
            return illegal("vertex out of range");
        }
        if trace.aux[v] {
            return illegal("auxiliary vertex");
        }
        if let Op::Cut(_) = op {
            if !has_parent[v] {
                return illegal("vertex has no parent");
            }
            has_parent[v] = false;
        }
    }
    Ok(())
}

/// Feeds every operation of `trace` to `s`, which must have been built on the
/// trace's initial forest. Mismatches against expected answers are recorded, not
/// fatal, and only when `check_expected` is set.
pub fn replay(trace: &Trace, s: &mut dyn ForestStructure, check_expected: bool) -> Result<ReplayReport> {
    check_legal(trace)?;
    for (index, op) in trace.ops.iter().enumerate() {
        if !s.supports(op.kind()) {
            return Err(Error::IllegalOperation { index, reason: format!("{:?} unsupported by structure", op.kind()) });
        }
    }
    let mut report = ReplayReport::default();
    let ops0 = s.group_ops();
    let probes0 = probe::get();
    for (index, op) in trace.ops.iter().enumerate() {
        let at = |e: Error| match e {
            Error::IllegalOperation { reason, .. } => Error::IllegalOperation { index, reason },
            other => other,
        };
        let answer = match *op {
            Op::Cut(v) => {
                s.cut(v).map_err(at)?;
                None
            }
            Op::Update(v, x) => {
                s.update_weight(v, x).map_err(at)?;
                None
            }
            Op::TreeSum(v, e) => Some((s.tree_sum(v).map_err(at)?, e)),
            Op::SubtreeSum(v, e) => Some((s.subtree_sum(v).map_err(at)?, e)),
        };
        if let Some((got, expected)) = answer {
            report.answers.push((index, got));
            if let Some(expected) = expected.filter(|&e| check_expected && e != got) {
                report.mismatches.push(Mismatch { index, expected, got });
            }
        }
        report.snapshots.push(Snapshot { group_ops: s.group_ops() - ops0, probes: probe::get().wrapping_sub(probes0) });
    }
    Ok(report)
}
