use thiserror::Error;

use crate::bound::AverageMode;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} did not converge (last error estimate {estimate:e}, budget {budget})")]
    NonConvergence {
        what: &'static str,
        estimate: f64,
        budget: usize,
    },

    #[error("root not bracketed: f({lo}) = {f_lo:e}, f({hi}) = {f_hi:e}")]
    BadBracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid couplings K = {k}, C = {c}: both must be finite and non-negative")]
    InvalidCouplings { k: f64, c: f64 },

    #[error("averaging mode {0:?} is not supported by this model")]
    UnsupportedMode(AverageMode),

    #[error("internal consistency check failed: {0}")]
    InternalInconsistency(String),

    #[error("invalid chain length {0}: must be even and at least 4")]
    InvalidN(usize),

    #[error("{0} sites exceeds the dense diagonalization limit of 12")]
    DimensionTooLarge(usize),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("Trotter number {n} must exceed beta*|E| = {beta_e}")]
    TrotterDomain { n: usize, beta_e: f64 },

    #[error("off-diagonal coupling must be positive, got {0}")]
    NonPositiveDelta(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
