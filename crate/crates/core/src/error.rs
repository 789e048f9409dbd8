use thiserror::Error;

/// Errors reported by the forest structures, generators and file formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parent relation contains a cycle through vertex {0}")]
    CycleDetected(usize),
    #[error("vertex {index} out of range for a forest of {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("vertex {0} has no parent")]
    NoParent(usize),
    #[error("vertex {0} is auxiliary")]
    AuxiliaryVertex(usize),
    #[error("forest is not binary: vertex {0} has more than two children")]
    NotBinary(usize),
    #[error("input is not a single tree")]
    NotATree,
    #[error("illegal operation at index {index}: {reason}")]
    IllegalOperation { index: usize, reason: String },
    #[error("weight {0} is not 0 or 1")]
    NonBinaryWeight(i64),
    #[error("code of {bits} bits does not fit a {word}-bit word")]
    WordOverflow { bits: u32, word: u32 },
    #[error("configured cap exceeded: {0}")]
    CapExceeded(String),
    #[error("weight of vertex {0} would become negative")]
    NegativeWeight(usize),
    #[error("forest of {n} vertices exceeds capacity {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("value {value} outside [{lo}, {hi}]")]
    ValueOutOfRange { value: i64, lo: i64, hi: i64 },
    #[error("invariant broken: {0}")]
    InvariantBroken(String),
    #[error("array position {0} flipped twice")]
    DoubleFlip(usize),
    #[error("update for position {got} arrived, expected {expected}")]
    OutOfOrderUpdate { expected: usize, got: usize },
    #[error("structure produced different traces on identical replays")]
    NondeterministicStructure,
    #[error("illegal operation sequence: {0}")]
    IllegalSequence(String),
    #[error("no correct computation tree within budget {0}")]
    Infeasible(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
