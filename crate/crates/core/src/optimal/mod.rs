//! Computation trees: straight-line programs attached to every possible operation
//! sequence on a fixed small forest. Includes the correctness check over integer
//! vectors, a search for trees of minimum maximum instruction depth (MID),
//! conversions to and from data structures, the budget-tripling wrapper for an
//! unknown number of operations and the universal assembly built on top of it.

mod adaptive;
mod check;
mod convert;
mod model;
mod search;
mod table_io;
mod universal;

pub use adaptive::{AdaptiveTreeSum, OptTable};
pub use check::{check_correct, expected_answer, BasisWeights};
pub use convert::{structure_to_tree, tree_to_structure, CtStructure, EngineAdapter, GroupStructure, Sym, TraceGroup};
pub use model::{
    evaluate, legal_labels, validate, validate_succinct, BinOp, ComputationTree, CtNode, Instruction, Label, Operand,
    Step, Violation,
};
pub use search::{fingerprint, search_optimal, search_optimal_with, OptResult, SearchCaps};
pub use table_io::{format_opt_table, parse_opt_table};
pub use universal::{opt_table_for, UniversalTreeSum, UNIVERSAL_M_CAP};
