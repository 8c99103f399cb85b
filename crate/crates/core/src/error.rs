use thiserror::Error;

use crate::rational::Rational;

/// Reasons a raw eater specification is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecViolation {
    #[error("component {index} has an endpoint outside [0,1]")]
    OutOfRange { index: usize },
    #[error("component {index} is a malformed interval (left end must be below right end)")]
    MalformedInterval { index: usize },
    #[error("components {index} and {next} overlap or are out of order")]
    Overlap { index: usize, next: usize },
    #[error("the first component does not contain 0")]
    MissingZero,
    #[error("expected {expected} gap tags, found {found}")]
    GapCountMismatch { expected: usize, found: usize },
    #[error("the specification has no components")]
    Empty,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid spec: {0}")]
    Spec(#[from] SpecViolation),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("point {0} lies in an exponential gap and has no exact local coordinate")]
    InexactCoordinate(Rational),
    #[error("cannot map between a finite and an infinite interval: the algebras are not isomorphic")]
    MixedEndpoint,
    #[error("specs are not isomorphic (signature mismatch at position {position})")]
    NotIsomorphic { position: usize },
    #[error("gap ({a}, {b}) could not be classified: {detail}")]
    Undecided { a: f64, b: f64, detail: String },
    #[error("({a}, {b}) is not a gap of the eater set: {detail}")]
    NotAGap { a: f64, b: f64, detail: String },
    #[error("ladder window: {0}")]
    Ladder(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
