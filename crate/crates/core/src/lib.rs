//! Decremental dynamic forests: component sums and subtree sums of a rooted,
//! vertex-weighted forest under edge deletions and weight updates.
//!
//! Structures are generic over a commutative [`group::Group`] and count their work
//! through [`group::Instrumented`] and the thread-local [`probe`] counter.

pub mod clustering;
pub mod connectivity;
pub mod error;
pub mod forest;
pub mod group;
pub mod optimal;
pub mod oracle;
pub mod probe;
pub mod structures;
pub mod subtree;
pub mod trace;
pub mod tree_size;
pub mod tree_sum;
pub mod workloads;

pub use error::{Error, Result};
pub use forest::{build_forest, is_ancestor_static, RootedForest};
