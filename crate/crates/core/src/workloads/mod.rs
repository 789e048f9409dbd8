//! Hard-instance generators: weighted spines for prefix sums, the parity path, and
//! partial sums under in-order block updates.

mod blocks;
mod parity;
mod spine;

pub use blocks::{block_partial_sum, BlockPartialSum};
pub use parity::{build_parity, parity_workload, ParityInstance, ParityWorkload};
pub use spine::{build_spine, spine_workload, SpineCuts, SpineInstance, SpineWorkload};
