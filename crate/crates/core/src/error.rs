use thiserror::Error;

use crate::pairings::PairingClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("k = {k} exceeds the {class} enumeration cap of {cap}")]
    CapExceeded { class: PairingClass, k: usize, cap: usize },

    #[error("pairing count for k = {k} does not fit in 64 bits")]
    CountOverflow { k: usize },

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("kernel has no value for lag {lag}")]
    KernelDomain { lag: usize },

    #[error("kernel is not positive semi-definite (pivot {pivot:.4e} at lag index {index})")]
    KernelNotPsd { index: usize, pivot: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("denominator is zero")]
    ZeroDenominator,

    #[error("degree bound {bound} is smaller than the polynomial degree {degree}")]
    DegreeBoundTooSmall { bound: u32, degree: u32 },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error(
        "no sign change of the growth estimate between p = {p_lo} ({growth_lo:.6}) and p = {p_hi} ({growth_hi:.6})"
    )]
    NoSignChange {
        p_lo: f64,
        p_hi: f64,
        growth_lo: f64,
        growth_hi: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("matrix dimension mismatch: expected {expected}x{expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variance probe needs at least two grid values of N, got {0}")]
    InsufficientGrid(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Process exit code used by the command-line front end: 3 for numeric or
    /// kernel failures, 2 for everything caused by the caller's input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::KernelNotPsd { .. } | Error::CountOverflow { .. } => 3,
            _ => 2,
        }
    }
}
