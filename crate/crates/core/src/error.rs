//! Error type shared by all modules.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad configuration or input parameter (rejected before any numerics run).
    #[error("config: {0}")]
    Config(String),

    /// Physical-domain violation detected by a module precondition.
    #[error("{module}: {message}")]
    Domain {
        module: &'static str,
        message: String,
    },

    /// Neither square root branch satisfies the required sign conventions.
    #[error("{context}: branch ambiguity, principal root {root} and its negation both violate the branch rules")]
    BranchAmbiguity {
        context: &'static str,
        root: Complex64,
    },

    /// The transverse decay constant has no positive real part: the field is
    /// not bound to the sheet.
    #[error("mode not confined: alpha = {alpha} (Re <= 0)")]
    NotConfined { alpha: Complex64 },

    /// The perturbation denominator 1 - (Z0 sigma'/2)^2 is numerically zero.
    #[error("perturbation singular: |1 - (Z0 sigma'/2)^2| = {denom_abs:.3e} < 1e-12")]
    SingularPerturbation { denom_abs: f64 },

    /// NaN or overflow produced mid-computation.
    #[error("non-finite value in {context} at step {step}")]
    NonFinite { context: &'static str, step: usize },

    /// An iterative refinement failed to meet its tolerance.
    #[error("{context}: no convergence after {iterations} refinements (last delta {last_delta:.3e})")]
    NoConvergence {
        context: &'static str,
        iterations: usize,
        last_delta: f64,
    },

    #[error("io {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 1 for configuration/IO problems, 2 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io { .. } => 1,
            _ => 2,
        }
    }
}
