//! Error types shared across the crate.

use thiserror::Error;

use crate::prnet::Violation;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A propagation network failed structural validation.
    #[error("invalid propagation network: {}", format_violations(.0))]
    InvalidNetwork(Vec<Violation>),

    /// Dipath enumeration hit the path-explosion guard.
    #[error("dipath count exceeds cap: more than {cap} root-to-leaf paths")]
    DipathCapExceeded { cap: usize },

    /// A sequence operation was called on an empty sequence.
    #[error("DTW requires non-empty sequences")]
    EmptySequence,

    /// The naive DTW recursion refuses sequences beyond its length guard.
    #[error("naive DTW limited to sequences of length <= {max}, got {len_a} and {len_b}")]
    NaiveLengthGuard { len_a: usize, len_b: usize, max: usize },

    /// A parameter or input is outside its documented domain.
    #[error("{0}")]
    Domain(String),

    /// Input data is structurally unusable beyond line-level parsing.
    #[error("{0}")]
    Data(String),

    /// Two mass functions over different frames were combined.
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    /// Dempster combination of totally conflicting evidence.
    #[error("total conflict: all combined mass lies on the empty set")]
    TotalConflict,

    /// A structured input file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
