use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::model::{BinOp, ComputationTree, CtNode, Instruction, Label, Operand};
use super::search::OptResult;

fn operand(o: &Operand) -> String {
    match o {
        Operand::Reg(i) => format!("R{i}"),
        Operand::Weight(v) => format!("W{v}"),
    }
}

fn label(l: &Label) -> String {
    match l {
        Label::Cut(v) => format!("cut:{v}"),
        Label::TreeSum(v) => format!("sum:{v}"),
        Label::Update(v) => format!("upd:{v}"),
    }
}

/// Text form: one `opt <fingerprint> <m> <mid>` line per result, then one line
/// `node <id> <parent> <label> <ret> <instructions>` per witness node (`-` for
/// absent fields, instructions like `R2=W0+R1` joined by commas), then `end`.
pub fn format_opt_table(results: &[OptResult]) -> String {
    let mut out = String::new();
    for r in results {
        let _ = writeln!(out, "opt {} {} {}", r.fingerprint, r.m, r.mid);
        for (id, n) in r.witness.nodes.iter().enumerate() {
            let parent = n.parent.map_or("-".into(), |p| p.to_string());
            let lab = n.label.as_ref().map_or("-".into(), label);
            let ret = n.ret.as_ref().map_or("-".into(), operand);
            let ins: Vec<String> = n
                .instructions
                .iter()
                .map(|i| {
                    let op = if i.op == BinOp::Add { '+' } else { '-' };
                    format!("R{}={}{}{}", i.target, operand(&i.x), op, operand(&i.y))
                })
                .collect();
            let ins = if ins.is_empty() { "-".to_string() } else { ins.join(",") };
            let _ = writeln!(out, "node {id} {parent} {lab} {ret} {ins}");
        }
        out.push_str("end\n");
    }
    out
}

fn parse_operand(s: &str) -> Option<Operand> {
    let (kind, num) = s.split_at(1.min(s.len()));
    let n = num.parse().ok()?;
    match kind {
        "R" => Some(Operand::Reg(n)),
        "W" => Some(Operand::Weight(n)),
        _ => None,
    }
}

fn parse_label(s: &str) -> Option<Label> {
    let (kind, v) = s.split_once(':')?;
    let v = v.parse().ok()?;
    match kind {
        "cut" => Some(Label::Cut(v)),
        "sum" => Some(Label::TreeSum(v)),
        "upd" => Some(Label::Update(v)),
        _ => None,
    }
}

fn parse_instruction(s: &str) -> Option<Instruction> {
    let (target, rhs) = s.split_once('=')?;
    let target = target.strip_prefix('R')?.parse().ok()?;
    let pos = rhs.char_indices().skip(1).find(|&(_, c)| c == '+' || c == '-')?.0;
    let op = if rhs.as_bytes()[pos] == b'+' { BinOp::Add } else { BinOp::Sub };
    Some(Instruction { target, op, x: parse_operand(&rhs[..pos])?, y: parse_operand(&rhs[pos + 1..])? })
}

pub fn parse_opt_table(text: &str) -> Result<Vec<OptResult>> {
    let mut out = Vec::new();
    let mut current: Option<OptResult> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let bad = |msg: &str| Error::Parse { line, msg: msg.to_string() };
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match fields.first().copied() {
            None => continue,
            Some("opt") if current.is_none() && fields.len() == 4 => {
                let m = fields[2].parse().map_err(|_| bad("bad m"))?;
                let mid = fields[3].parse().map_err(|_| bad("bad mid"))?;
                let witness = ComputationTree { height: m, nodes: Vec::new() };
                current = Some(OptResult { fingerprint: fields[1].to_string(), m, mid, witness });
            }
            Some("node") if fields.len() == 6 => {
                let r = current.as_mut().ok_or_else(|| bad("node outside an opt block"))?;
                let nodes = &mut r.witness.nodes;
                let id: usize = fields[1].parse().map_err(|_| bad("bad node id"))?;
                if id != nodes.len() {
                    return Err(bad("node ids must be consecutive"));
                }
                let parent = match fields[2] {
                    "-" => None,
                    p => Some(p.parse::<usize>().ok().filter(|&p| p < id).ok_or_else(|| bad("bad parent"))?),
                };
                let label = match fields[3] {
                    "-" => None,
                    l => Some(parse_label(l).ok_or_else(|| bad("bad label"))?),
                };
                let ret = match fields[4] {
                    "-" => None,
                    o => Some(parse_operand(o).ok_or_else(|| bad("bad return operand"))?),
                };
                let instructions = match fields[5] {
                    "-" => Vec::new(),
                    s => s.split(',').map(|x| parse_instruction(x).ok_or_else(|| bad("bad instruction"))).collect::<Result<_>>()?,
                };
                if let Some(p) = parent {
                    nodes[p].children.push(id);
                }
                nodes.push(CtNode { parent, label, instructions, ret, children: Vec::new() });
            }
            Some("end") if fields.len() == 1 => {
                let r = current.take().ok_or_else(|| bad("end without opt"))?;
                if r.witness.nodes.is_empty() {
                    return Err(bad("empty witness"));
                }
                out.push(r);
            }
            _ => return Err(bad("unrecognized line")),
        }
    }
    if current.is_some() {
        return Err(Error::Parse { line: text.lines().count(), msg: "missing end".into() });
    }
    Ok(out)
}
