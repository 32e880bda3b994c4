use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("angle {theta} lies outside the tabulated range [{lo}, {hi}]")]
    InterpolationRange { theta: f64, lo: f64, hi: f64 },

    #[error("weight is not integrable near angle {angle} (local power {power}, log power {log_power})")]
    DivergentWeight {
        angle: f64,
        power: f64,
        log_power: f64,
    },

    #[error("weight is not in L log L near angle {angle} (local power {power}, log power {log_power})")]
    NotLlogL {
        angle: f64,
        power: f64,
        log_power: f64,
    },

    #[error("boundary mass matrix is numerically singular (min eigenvalue below {threshold:e})")]
    DegenerateWeight { threshold: f64 },

    #[error("Cholesky factorization of the mass matrix failed (min eigenvalue {min_eigenvalue:e})")]
    Conditioning { min_eigenvalue: f64 },

    #[error("sigma = {sigma} lies beyond the trusted window (largest trusted eigenvalue {limit})")]
    UntrustedRange { sigma: f64, limit: f64 },

    #[error("fit window [{lo}, {hi}] contains {found} eigenvalues, need at least {needed}")]
    TooFewEigenvalues {
        lo: f64,
        hi: f64,
        found: usize,
        needed: usize,
    },

    #[error("spectra belong to different weights ({0} vs {1})")]
    MismatchedWeight(String, String),

    #[error("cannot parse weight descriptor {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code, used by the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "INVALID_PARAMETER",
            Error::InterpolationRange { .. } => "INTERPOLATION_RANGE",
            Error::DivergentWeight { .. } | Error::NotLlogL { .. } => "DIVERGENT_WEIGHT",
            Error::DegenerateWeight { .. } => "DEGENERATE_WEIGHT",
            Error::Conditioning { .. } => "CONDITIONING",
            Error::UntrustedRange { .. } => "UNTRUSTED_RANGE",
            Error::TooFewEigenvalues { .. } => "TOO_FEW_EIGENVALUES",
            Error::MismatchedWeight(..) => "MISMATCHED_WEIGHT",
            Error::Parse { .. } => "PARSE",
            Error::Io(_) => "IO",
        }
    }
}
