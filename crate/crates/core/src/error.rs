use thiserror::Error;

use crate::visibility::LatticePoint;

/// Errors raised by the library. Each variant corresponds to one class of
/// rejected input so that front ends can map them to exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid exponent pair ({b1},{b2}): {reason}")]
    InvalidExponent { b1: u32, b2: u32, reason: &'static str },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("undefined input: {0}")]
    Undefined(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("duplicate watchpoint {point} at positions {first} and {second}")]
    DuplicateWatchpoint {
        point: LatticePoint,
        first: usize,
        second: usize,
    },

    #[error("watchpoints {p} and {q} are not mutually visible")]
    NotMutuallyVisible { p: LatticePoint, q: LatticePoint },

    #[error("{len} watchpoints exceed the bound {bound} for this exponent pair")]
    TooManyWatchpoints { len: usize, bound: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
