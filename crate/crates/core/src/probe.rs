//! Thread-local unit-work counter.
//!
//! Structures call [`tick`] for each table probe, traversal step, relabel and
//! delegated call, so growth of total work can be measured independently of
//! wall-clock time. The counter is per thread; a measurement is `reset` then `get`.

use std::cell::Cell;

thread_local! {
    static PROBES: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub fn tick(k: u64) {
    PROBES.with(|p| p.set(p.get().wrapping_add(k)));
}

pub fn get() -> u64 {
    PROBES.with(|p| p.get())
}

pub fn reset() {
    PROBES.with(|p| p.set(0));
}
