use alloc::string::String;
use core::fmt;

use crate::spectral::Basis;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A type parameter was not strictly greater than -1 (or not finite).
    InvalidParameter {
        alpha: f64,
        beta: f64,
    },
    /// An evaluation point fell outside the open (or closed) interval required.
    Domain {
        what: &'static str,
        value: f64,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    BasisMismatch {
        expected: Basis,
        found: Basis,
    },
    /// The exact algebra refuses degrees above its configured cap.
    DegreeCap {
        degree: u32,
        cap: u32,
    },
    /// The result of an exact operation has a singular factor `1/(1 - x_i^2)` left over.
    NotRepresentable {
        operation: &'static str,
    },
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
    InsufficientResolution {
        nodes: usize,
        required: usize,
    },
    UnknownIdentity(String),
    InvalidArgument(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { alpha, beta } => {
                write!(
                    f,
                    "type parameters must exceed -1, got alpha={alpha}, beta={beta}"
                )
            }
            Error::Domain { what, value } => write!(f, "{what}: {value} is outside the domain"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::BasisMismatch { expected, found } => {
                write!(f, "basis mismatch: expected {expected}, found {found}")
            }
            Error::DegreeCap { degree, cap } => {
                write!(f, "degree {degree} exceeds the exact-algebra cap {cap}")
            }
            Error::NotRepresentable { operation } => {
                write!(f, "{operation}: result is not a Φ-weighted polynomial")
            }
            Error::NoConvergence { what, iterations } => {
                write!(f, "{what} did not converge after {iterations} iterations")
            }
            Error::InsufficientResolution { nodes, required } => {
                write!(
                    f,
                    "grid has {nodes} nodes per coordinate, at least {required} required"
                )
            }
            Error::UnknownIdentity(name) => write!(f, "unknown identity `{name}`"),
            Error::InvalidArgument(msg) => f.write_str(msg),
        }
    }
}

impl core::error::Error for Error {}
