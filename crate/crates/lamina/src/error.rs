use num::Complex;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A floating-point procedure failed to reach its tolerance.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A traced ray ran into a pre-critical point.
    #[error("ray crashed into a pre-critical point at potential {potential} near {point}")]
    RayCrash { potential: f64, point: Complex<f64> },

    #[error("no convergence below potential {last_potential}")]
    NonConvergence { last_potential: f64 },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }

    /// True for failures of floating-point machinery rather than bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::Numeric(_) | Error::RayCrash { .. } | Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
