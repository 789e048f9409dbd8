//! Commutative groups as seen by the structures: opaque elements with `zero`,
//! `add` and `sub` only.
//!
//! Structures are generic over [`Group`], whose element type carries no equality
//! bound, so a structure cannot branch on group values. Tests get equality through
//! [`ObservableGroup`], which concrete groups implement and structures never require.

use std::fmt::Debug;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub trait Group: Clone + Send + Sync + 'static {
    type Elem: Clone + Debug + Send + Sync + 'static;

    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Sum of a non-empty sequence using `len - 1` additions; `zero` for an empty one.
    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
    {
        let mut it = items.into_iter();
        match it.next() {
            None => self.zero(),
            Some(first) => it.fold(first.clone(), |acc, x| self.add(&acc, x)),
        }
    }
}

/// Equality on group elements. Test-only capability; no structure bound requires it.
pub trait ObservableGroup: Group {
    fn equals(&self, a: &Self::Elem, b: &Self::Elem) -> bool;
}

/// Groups into which trace integers embed.
pub trait IntegerEmbedding: ObservableGroup {
    fn embed(&self, x: i64) -> Self::Elem;
}

/// The integers with wrapping arithmetic.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntGroup;

impl Group for IntGroup {
    type Elem = i64;
    fn zero(&self) -> i64 {
        0
    }
    fn add(&self, a: &i64, b: &i64) -> i64 {
        a.wrapping_add(*b)
    }
    fn sub(&self, a: &i64, b: &i64) -> i64 {
        a.wrapping_sub(*b)
    }
}

impl ObservableGroup for IntGroup {
    fn equals(&self, a: &i64, b: &i64) -> bool {
        a == b
    }
}

impl IntegerEmbedding for IntGroup {
    fn embed(&self, x: i64) -> i64 {
        x
    }
}

/// Integers modulo `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModGroup {
    pub p: u64,
}

impl ModGroup {
    pub fn new(p: u64) -> Self {
        assert!(p >= 1, "modulus must be positive");
        ModGroup { p }
    }
}

impl Group for ModGroup {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + *b as u128) % self.p as u128) as u64
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 + self.p as u128 - (*b % self.p) as u128) % self.p as u128) as u64
    }
}

impl ObservableGroup for ModGroup {
    fn equals(&self, a: &u64, b: &u64) -> bool {
        a % self.p == b % self.p
    }
}

impl IntegerEmbedding for ModGroup {
    fn embed(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }
}

/// `Z^dim` with componentwise wrapping arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VecGroup {
    pub dim: usize,
}

impl VecGroup {
    pub fn basis(&self, i: usize) -> Vec<i64> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }
}

impl Group for VecGroup {
    type Elem = Vec<i64>;
    fn zero(&self) -> Vec<i64> {
        vec![0; self.dim]
    }
    fn add(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x.wrapping_add(*y)).collect()
    }
    fn sub(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x.wrapping_sub(*y)).collect()
    }
}

impl ObservableGroup for VecGroup {
    fn equals(&self, a: &Vec<i64>, b: &Vec<i64>) -> bool {
        a == b
    }
}

impl IntegerEmbedding for VecGroup {
    fn embed(&self, x: i64) -> Vec<i64> {
        vec![x; self.dim]
    }
}

/// Add/sub totals of an [`Instrumented`] group.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub adds: u64,
    pub subs: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.adds.saturating_add(self.subs)
    }
}

impl std::ops::Sub for OpCounts {
    type Output = OpCounts;
    fn sub(self, rhs: OpCounts) -> OpCounts {
        OpCounts { adds: self.adds - rhs.adds, subs: self.subs - rhs.subs }
    }
}

#[derive(Debug, Default)]
struct Counters {
    adds: AtomicU64,
    subs: AtomicU64,
}

fn bump(c: &AtomicU64) {
    let _ = c.fetch_update(Ordering::Relaxed, Ordering::Relaxed, |x| Some(x.saturating_add(1)));
}

/// Forwards to `inner` and counts every `add`/`sub`. Clones share counters.
#[derive(Debug, Clone)]
pub struct Instrumented<G> {
    inner: G,
    counters: Arc<Counters>,
}

impl<G: Group> Instrumented<G> {
    pub fn new(inner: G) -> Self {
        Instrumented { inner, counters: Arc::default() }
    }

    pub fn inner(&self) -> &G {
        &self.inner
    }

    pub fn counts(&self) -> OpCounts {
        OpCounts {
            adds: self.counters.adds.load(Ordering::Relaxed),
            subs: self.counters.subs.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.counters.adds.store(0, Ordering::Relaxed);
        self.counters.subs.store(0, Ordering::Relaxed);
    }
}

impl<G: Group> Group for Instrumented<G> {
    type Elem = G::Elem;
    fn zero(&self) -> G::Elem {
        self.inner.zero()
    }
    fn add(&self, a: &G::Elem, b: &G::Elem) -> G::Elem {
        bump(&self.counters.adds);
        self.inner.add(a, b)
    }
    fn sub(&self, a: &G::Elem, b: &G::Elem) -> G::Elem {
        bump(&self.counters.subs);
        self.inner.sub(a, b)
    }
}

impl<G: ObservableGroup> ObservableGroup for Instrumented<G> {
    fn equals(&self, a: &G::Elem, b: &G::Elem) -> bool {
        self.inner.equals(a, b)
    }
}

impl<G: IntegerEmbedding> IntegerEmbedding for Instrumented<G> {
    fn embed(&self, x: i64) -> G::Elem {
        self.inner.embed(x)
    }
}
