use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::probe;

/// Per-vertex entries a size table may hold.
pub const TABLE_CAP: usize = 1 << 24;

const MAGIC: &[u8; 8] = b"DFSIZE01";

/// A 0-1-weighted forest on vertices `1..=ℓ` packed into one word.
///
/// With `p = ceil(log2(ℓ + 1))`, vertex `i` occupies bits `[(i-1)(p+1), i(p+1))`:
/// its parent (0 for a root) in the low `p` bits and its weight in the top bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ForestCode {
    pub ell: usize,
    pub bits: u64,
}

pub(crate) fn parent_bits(ell: usize) -> u32 {
    usize::BITS - ell.leading_zeros()
}

impl ForestCode {
    /// Code length `ℓ(p + 1)` in bits.
    pub fn width(ell: usize) -> u32 {
        ell as u32 * (parent_bits(ell) + 1)
    }

    /// `parents` and `weights` use 0-based ids; `parents.len()` is `ℓ`.
    pub fn encode(parents: &[Option<usize>], weights: &[u8]) -> Result<ForestCode> {
        let ell = parents.len();
        let width = Self::width(ell);
        if width > u64::BITS {
            return Err(Error::WordOverflow { bits: width, word: u64::BITS });
        }
        let p = parent_bits(ell);
        let mut bits = 0u64;
        for (i, (par, &w)) in parents.iter().zip(weights).enumerate() {
            if w > 1 {
                return Err(Error::NonBinaryWeight(w as i64));
            }
            let field = par.map_or(0, |q| q as u64 + 1) | (w as u64) << p;
            bits |= field << (i as u32 * (p + 1));
        }
        Ok(ForestCode { ell, bits })
    }

    /// Parents (0-based) and weights, or `None` if the word is not a forest.
    pub fn decode(&self) -> Option<(Vec<Option<usize>>, Vec<u8>)> {
        let ell = self.ell;
        let p = parent_bits(ell);
        if Self::width(ell) < u64::BITS && self.bits >> Self::width(ell) != 0 {
            return None;
        }
        let mut parents = Vec::with_capacity(ell);
        let mut weights = Vec::with_capacity(ell);
        for i in 0..ell {
            let field = self.bits >> (i as u32 * (p + 1));
            let par = (field & ((1 << p) - 1)) as usize;
            if par > ell || par == i + 1 {
                return None;
            }
            parents.push(par.checked_sub(1));
            weights.push(((field >> p) & 1) as u8);
        }
        for start in 0..ell {
            let mut v = start;
            for _ in 0..=ell {
                match parents[v] {
                    Some(q) => v = q,
                    None => break,
                }
            }
            if parents[v].is_some() {
                return None;
            }
        }
        Some((parents, weights))
    }
}

/// Answers and successor codes for every code of a fixed `ℓ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalSizeTable {
    ell: usize,
    valid: Vec<bool>,
    sums: Vec<u8>,
    set0: Vec<u32>,
    set1: Vec<u32>,
    cut: Vec<u32>,
}

/// Builds the table for forests of exactly `ℓ` vertices.
pub fn build_global_table(ell: usize) -> Result<GlobalSizeTable> {
    if ell == 0 {
        return Err(Error::ValueOutOfRange { value: 0, lo: 1, hi: 6 });
    }
    let width = ForestCode::width(ell);
    if width > 32 {
        return Err(Error::WordOverflow { bits: width, word: 32 });
    }
    let slots = 1usize << width;
    if slots.saturating_mul(ell) > TABLE_CAP {
        return Err(Error::CapExceeded(format!("size table for ℓ={ell} needs {} entries", slots * ell)));
    }
    let mut t = GlobalSizeTable {
        ell,
        valid: vec![false; slots],
        sums: vec![0; slots * ell],
        set0: vec![0; slots * ell],
        set1: vec![0; slots * ell],
        cut: vec![0; slots * ell],
    };
    let p = parent_bits(ell);
    let field = |v: usize| v as u32 * (p + 1);
    for code in 0..slots {
        probe::tick(1);
        let Some((parents, weights)) = (ForestCode { ell, bits: code as u64 }).decode() else {
            continue;
        };
        t.valid[code] = true;
        let root = |mut v: usize| {
            while let Some(q) = parents[v] {
                v = q;
            }
            v
        };
        let roots: Vec<usize> = (0..ell).map(root).collect();
        for v in 0..ell {
            probe::tick(1);
            let i = code * ell + v;
            t.sums[i] = (0..ell).filter(|&x| roots[x] == roots[v]).map(|x| weights[x]).sum();
            let wbit = 1u32 << (field(v) + p);
            t.set0[i] = code as u32 & !wbit;
            t.set1[i] = code as u32 | wbit;
            t.cut[i] = code as u32 & !(((1u32 << p) - 1) << field(v));
        }
    }
    Ok(t)
}

impl GlobalSizeTable {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn slots(&self) -> usize {
        self.valid.len()
    }

    pub fn is_valid(&self, code: u32) -> bool {
        self.valid.get(code as usize).copied().unwrap_or(false)
    }

    #[inline]
    pub fn tree_sum(&self, code: u32, v: usize) -> u8 {
        self.sums[code as usize * self.ell + v]
    }

    #[inline]
    pub fn set_weight(&self, code: u32, v: usize, bit: bool) -> u32 {
        let i = code as usize * self.ell + v;
        if bit {
            self.set1[i]
        } else {
            self.set0[i]
        }
    }

    #[inline]
    pub fn cut(&self, code: u32, v: usize) -> u32 {
        self.cut[code as usize * self.ell + v]
    }

    /// Shared table for `ℓ`, built on first use.
    pub fn shared(ell: usize) -> Result<Arc<GlobalSizeTable>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GlobalSizeTable>>>> = OnceLock::new();
        let mut cache = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = cache.get(&ell) {
            return Ok(t.clone());
        }
        let t = Arc::new(build_global_table(ell)?);
        cache.insert(ell, t.clone());
        Ok(t)
    }

    /// Magic, `ℓ` as little-endian `u32`, then per slot a validity byte, `ℓ` sums
    /// and `3ℓ` little-endian `u32` successor codes (set-0, set-1, cut).
    pub fn write_to(&self, out: &mut impl Write) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&(self.ell as u32).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.slots() * (1 + 13 * self.ell));
        for code in 0..self.slots() {
            buf.push(self.valid[code] as u8);
            let r = code * self.ell..(code + 1) * self.ell;
            buf.extend_from_slice(&self.sums[r.clone()]);
            for arr in [&self.set0, &self.set1, &self.cut] {
                for x in &arr[r.clone()] {
                    buf.extend_from_slice(&x.to_le_bytes());
                }
            }
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(input: &mut impl Read) -> Result<GlobalSizeTable> {
        let bad = |msg: &str| Error::Parse { line: 0, msg: msg.to_string() };
        let mut data = Vec::new();
        input.read_to_end(&mut data)?;
        if data.len() < 12 || &data[..8] != MAGIC {
            return Err(bad("not a size table"));
        }
        let ell = u32::from_le_bytes(data[8..12].try_into().expect("4 bytes")) as usize;
        if ell == 0 || ForestCode::width(ell) > 32 {
            return Err(bad("bad ℓ"));
        }
        let slots = 1usize << ForestCode::width(ell);
        let rec = 1 + 13 * ell;
        if data.len() != 12 + slots * rec {
            return Err(bad("truncated size table"));
        }
        let mut t = GlobalSizeTable {
            ell,
            valid: Vec::with_capacity(slots),
            sums: Vec::with_capacity(slots * ell),
            set0: Vec::with_capacity(slots * ell),
            set1: Vec::with_capacity(slots * ell),
            cut: Vec::with_capacity(slots * ell),
        };
        for chunk in data[12..].chunks_exact(rec) {
            t.valid.push(chunk[0] != 0);
            t.sums.extend_from_slice(&chunk[1..1 + ell]);
            let words: Vec<u32> =
                chunk[1 + ell..].chunks_exact(4).map(|b| u32::from_le_bytes(b.try_into().expect("4 bytes"))).collect();
            t.set0.extend_from_slice(&words[..ell]);
            t.set1.extend_from_slice(&words[ell..2 * ell]);
            t.cut.extend_from_slice(&words[2 * ell..]);
        }
        Ok(t)
    }
}
