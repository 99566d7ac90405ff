use thiserror::Error;

use crate::network::{BusId, Diagnostic};

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("malformed network document: {0}")]
    Parse(String),
    #[error("invalid network: {}", join(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("network size {0} is below the minimum of 2 buses")]
    Size(usize),
}

fn join(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("clamp bounds out of order: lo = {lo}, hi = {hi}")]
    BadBounds { lo: f64, hi: f64 },
    #[error("zero polynomial has no isolated roots")]
    ZeroPolynomial,
    #[error("polynomial degree {0} exceeds 4")]
    DegreeTooHigh(usize),
    #[error("invalid subproblem: {0}")]
    InvalidInput(&'static str),
    #[error("constraint matrix is rank deficient")]
    RankDeficient,
    #[error("no KKT-consistent candidate found")]
    NoCandidate,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("bus {bus}: {source}")]
    Kernel {
        bus: BusId,
        #[source]
        source: KernelError,
    },
    #[error("bus {bus}: missing inbound message ({what})")]
    MissingMessage { bus: BusId, what: &'static str },
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}
