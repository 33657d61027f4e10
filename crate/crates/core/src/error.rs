use thiserror::Error;

use crate::nsbox::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
    #[error("table is not a valid non-signalling box: {0}")]
    InvalidBox(ValidationReport),
    #[error("correlators lie outside the non-signalling polytope (entry p({0}) = {1})")]
    OutsidePolytope(String, String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("numeric overflow: {0}")]
    Overflow(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
