use thiserror::Error;

use crate::circuit::{ParseError, Violation};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid circuit: {}", join_violations(.0))]
    InvalidCircuit(Vec<Violation>),

    #[error("circuit width {width} exceeds the qubit cap of {cap}")]
    WidthCap { width: usize, cap: usize },

    #[error("{what} exceeds enumeration cap ({limit})")]
    EnumerationCap { what: String, limit: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("invalid fidelity {0}: must lie in [0, 1]")]
    InvalidFidelity(f64),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("illegal eta gate at step {step}: {reason}")]
    IllegalEta { step: usize, reason: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
