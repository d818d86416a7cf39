use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical engine and the command-line surface.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: max asymmetry {max_asymmetry:e} exceeds {tolerance:e}")]
    NotSymmetric { max_asymmetry: f64, tolerance: f64 },

    #[error("matrix is not orthogonal: max |u·uᵀ - I| = {deviation:e}")]
    NotOrthogonal { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unsupported parameter `{name}`: {reason}")]
    Unsupported { name: &'static str, reason: String },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("threshold not bracketed: concurrence({t_lo}) = {c_lo:e}, concurrence({t_hi}) = {c_hi:e}")]
    Unbracketed {
        t_lo: f64,
        t_hi: f64,
        c_lo: f64,
        c_hi: f64,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
