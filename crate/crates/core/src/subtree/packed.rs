use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::probe;

/// Default entry cap for Q tables.
pub const Q_CAP: usize = 1 << 24;

/// `k` counters in `[0, k]` packed into one integer in radix `k + 1`; counter `i`
/// has weight `(k + 1)^i`, so an increment is a single addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PackedCounters {
    k: u32,
    value: u64,
}

impl PackedCounters {
    pub fn zero(k: usize) -> Self {
        PackedCounters { k: k as u32, value: 0 }
    }

    pub fn pack(values: &[u32]) -> Self {
        let k = values.len() as u32;
        let value = values.iter().rev().fold(0u64, |acc, &x| {
            assert!(x <= k, "counter {x} exceeds {k}");
            acc * (k as u64 + 1) + x as u64
        });
        PackedCounters { k, value }
    }

    pub fn unpack(&self) -> Vec<u32> {
        let r = self.k as u64 + 1;
        let mut v = self.value;
        (0..self.k)
            .map(|_| {
                let x = (v % r) as u32;
                v /= r;
                x
            })
            .collect()
    }

    /// Radix-`k+1` value, the Q-table row index.
    pub fn value(&self) -> u64 {
        self.value
    }

    /// Counter whose radix weight is `power`.
    #[inline]
    pub fn counter(&self, power: u64) -> u32 {
        ((self.value / power) % (self.k as u64 + 1)) as u32
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    #[inline]
    pub fn increment(&mut self, power: u64) {
        debug_assert!(self.counter(power) < self.k);
        self.value += power;
    }

    pub fn clear(&mut self) {
        self.value = 0;
    }
}

/// `Q[B, U] = Σ_{i ∈ U} B[i]` for every packed `B` with counters in `[0, k]` and
/// every subset `U` of `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QTable {
    k: usize,
    powers: Vec<u64>,
    entries: Vec<u16>,
}

pub fn build_q_table(k: usize) -> Result<QTable> {
    build_q_table_with_cap(k, Q_CAP)
}

/// As [`build_q_table`] with an explicit entry cap.
pub fn build_q_table_with_cap(k: usize, cap: usize) -> Result<QTable> {
    if k == 0 || k > 16 {
        return Err(Error::CapExceeded(format!("Q table parameter {k} outside 1..=16")));
    }
    let rows = (k as u64 + 1).checked_pow(k as u32);
    let size = rows.and_then(|r| r.checked_mul(1 << k)).filter(|&s| s <= cap as u64);
    let Some(size) = size else {
        return Err(Error::CapExceeded(format!("Q table for k={k} exceeds {cap} entries")));
    };
    let rows = rows.expect("checked above") as usize;
    let mut entries = vec![0u16; size as usize];
    let mut counters = vec![0u16; k];
    for row in 0..rows {
        let base = row << k;
        for u in 1usize..(1 << k) {
            // lowest set bit of u plus the sum for u without it
            let low = u.trailing_zeros() as usize;
            entries[base + u] = entries[base + (u & (u - 1))] + counters[low];
        }
        probe::tick(1 << k);
        for c in counters.iter_mut() {
            *c += 1;
            if *c as usize <= k {
                break;
            }
            *c = 0;
        }
    }
    let powers = (0..k).map(|i| (k as u64 + 1).pow(i as u32)).collect();
    Ok(QTable { k, powers, entries })
}

impl QTable {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Weight of counter `i` in a packed value.
    #[inline]
    pub fn power(&self, i: usize) -> u64 {
        self.powers[i]
    }

    #[inline]
    pub fn get(&self, b: PackedCounters, subset: u64) -> u16 {
        debug_assert!(subset < 1 << self.k);
        self.entries[((b.value as usize) << self.k) | subset as usize]
    }

    /// Shared table for `k`, built on first use.
    pub fn shared(k: usize) -> Result<Arc<QTable>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QTable>>>> = OnceLock::new();
        let mut cache = CACHE.get_or_init(Default::default).lock().unwrap_or_else(|e| e.into_inner());
        if let Some(t) = cache.get(&k) {
            return Ok(t.clone());
        }
        let t = Arc::new(build_q_table(k)?);
        cache.insert(k, t.clone());
        Ok(t)
    }

    /// Little-endian dump: `k` as `u32`, then every entry as `u16`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = b"DFQTBL01".to_vec();
        out.extend_from_slice(&(self.k as u32).to_le_bytes());
        for e in &self.entries {
            out.extend_from_slice(&e.to_le_bytes());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_round_trip() {
        let b = PackedCounters::pack(&[2, 1]);
        assert_eq!(b.value(), 2 + 3);
        assert_eq!(b.unpack(), vec![2, 1]);
        let mut z = PackedCounters::zero(4);
        z.increment(125);
        z.increment(1);
        assert_eq!(z.counter(125), 1);
        assert_eq!(z.unpack(), vec![1, 0, 0, 1]);
    }

    #[test]
    fn small_entries() {
        let q = build_q_table(2).unwrap();
        assert_eq!(q.len(), 36);
        assert_eq!(q.get(PackedCounters::pack(&[1, 0]), 0b01), 1);
        assert_eq!(q.get(PackedCounters::pack(&[2, 1]), 0b11), 3);
        assert_eq!(q.get(PackedCounters::pack(&[2, 1]), 0b10), 1);
    }

    #[test]
    fn caps() {
        assert_eq!(build_q_table(4).unwrap().len(), 10_000);
        assert!(build_q_table(6).is_ok());
        assert!(matches!(build_q_table(8), Err(Error::CapExceeded(_))));
        assert!(matches!(build_q_table_with_cap(4, 9_999), Err(Error::CapExceeded(_))));
    }
}
