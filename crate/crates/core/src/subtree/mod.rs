//! Subtree sums of 0-1-weighted forests under cuts: a delayed-update structure for
//! a few dozen vertices, its recursive cluster assembly, and the top level for
//! arbitrary forests.

mod packed;
mod recursive;
mod small;
mod top;

pub use packed::{build_q_table, build_q_table_with_cap, PackedCounters, QTable, Q_CAP};
pub use recursive::RecursiveSubtreeSum;
pub use small::{SmallSubtreeSum, SMALL_MAX};
pub use top::{subtree_parameters, SubtreeSize};
