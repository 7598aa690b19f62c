use thiserror::Error;

use crate::code::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range (expected < {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("enumeration of {subsets} subsets exceeds the budget of {budget}")]
    BudgetExceeded { subsets: u128, budget: u64 },

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("{what} ({value}) must divide alpha ({alpha})")]
    NotDivisible {
        what: &'static str,
        value: usize,
        alpha: usize,
    },

    #[error("file size {file_size} exceeds the number of distinct symbols {theta}")]
    FileTooLarge { file_size: usize, theta: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} is not a prime power")]
    NotPrimePower(usize),

    #[error("graph is not regular: vertex {vertex} has degree {degree}, expected {expected}")]
    NonRegularGraph {
        vertex: usize,
        degree: usize,
        expected: usize,
    },

    #[error("invalid FR code: {}", join_violations(.0))]
    InvalidCode(Vec<Violation>),

    #[error("bound not applicable: {0}")]
    Inapplicable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("inverse of zero")]
    ZeroInverse,

    #[error("unrecoverable: {have} distinct positions available, {need} required")]
    Unrecoverable { have: usize, need: usize },

    #[error("corruption detected at position {position}")]
    Corruption { position: usize },

    #[error("content digest mismatch")]
    DigestMismatch,

    #[error("node {node} has no intact local structure")]
    LocalRepairUnavailable { node: usize },

    #[error("node {node} cannot be repaired from the surviving nodes")]
    Unrepairable { node: usize },

    #[error("reconstruction failed: {covered} distinct symbols gathered, {needed} required (deficit {})", .needed - .covered)]
    ReconstructionFailed { covered: usize, needed: usize },

    #[error("node {node} is not alive")]
    DeadNode { node: usize },

    #[error("node {node} is not failed")]
    NodeNotFailed { node: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// Stable snake_case name of the variant, for machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::SizeMismatch { .. } => "size_mismatch",
            Error::NotDivisible { .. } => "not_divisible",
            Error::FileTooLarge { .. } => "file_too_large",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::NotPrimePower(_) => "not_prime_power",
            Error::NonRegularGraph { .. } => "non_regular_graph",
            Error::InvalidCode(_) => "invalid_code",
            Error::Inapplicable(_) => "inapplicable",
            Error::Parse(_) => "parse",
            Error::ZeroInverse => "zero_inverse",
            Error::Unrecoverable { .. } => "unrecoverable",
            Error::Corruption { .. } => "corruption",
            Error::DigestMismatch => "digest_mismatch",
            Error::LocalRepairUnavailable { .. } => "local_repair_unavailable",
            Error::Unrepairable { .. } => "unrepairable",
            Error::ReconstructionFailed { .. } => "reconstruction_failed",
            Error::DeadNode { .. } => "dead_node",
            Error::NodeNotFailed { .. } => "node_not_failed",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Toml(_) => "toml",
        }
    }

    /// Structured details: the violation list for invalid codes.
    pub fn violations(&self) -> Option<&[Violation]> {
        match self {
            Error::InvalidCode(v) => Some(v),
            _ => None,
        }
    }
}
