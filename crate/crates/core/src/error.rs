use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("weights differ ({0} vs {1})")]
    WeightMismatch(u32, u32),

    #[error("packing violation: {tau_subset:?} lies in blocks {block1:?} and {block2:?}")]
    PackingViolation {
        tau_subset: Vec<u32>,
        block1: Vec<u32>,
        block2: Vec<u32>,
    },

    #[error("bad order {n}: {reason}")]
    BadOrder { n: u32, reason: String },

    #[error("inconsistent leave spec: {0}")]
    InconsistentSpec(String),

    #[error("search budget exhausted before a result was found: {0}")]
    NotFound(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("cycles overlap at point {0}")]
    OverlappingCycles(u32),

    #[error("point {point} out of range for n={n}")]
    PointOutOfRange { point: u64, n: u32 },

    #[error("table {id}: {detail}")]
    TableMismatch { id: String, detail: String },

    #[error("unknown catalog entry {0}")]
    UnknownEntry(String),

    #[error("no optimal packing for n={0} within budget")]
    PackingUnavailable(u32),

    #[error("no recipe for n={n}; nearest covered lengths: {nearest:?}")]
    NoRecipe { n: u32, nearest: Vec<u32> },

    #[error("group code mismatch: {0}")]
    GroupCodeMismatch(String),

    #[error("property ({0}) violated: {1}")]
    PropertyViolation(char, String),

    #[error("symbol 2 on adjoined point {0}")]
    Symbol2OnExtraPoint(u32),

    #[error("no modular ruler ({n},{k}) within budget")]
    RulerUnavailable { n: u32, k: u32 },

    #[error("({n},{k}) ruler infeasible: {k}({k}-1) differences exceed {n}-1 residues")]
    InfeasibleByCount { n: u32, k: u32 },

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
