//! Component sizes of 0-1-weighted forests in linear total time: a lookup-table
//! structure for forests of at most `ℓ` vertices under two cluster reductions.

mod code;
mod linear;
mod micro;

pub use code::{build_global_table, ForestCode, GlobalSizeTable, TABLE_CAP};
pub use linear::{linear_ell, LinearTreeSize};
pub use micro::MicroTreeSize;
