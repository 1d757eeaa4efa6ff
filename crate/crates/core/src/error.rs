use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` out of domain: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("singular configuration: {0}")]
    Singular(String),

    /// The drift matrix has an eigenvalue with non-negative real part.
    #[error("unstable configuration: largest eigenvalue real part {margin:.6e} rad/s")]
    Unstable { margin: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("floor model rejected: {0}")]
    FloorModel(String),

    #[error("empty band [{lo}, {hi}] Hz")]
    EmptyBand { lo: f64, hi: f64 },

    #[error("unit mismatch: expected {expected}, found {found}")]
    Unit {
        expected: &'static str,
        found: &'static str,
    },

    #[error("eigensolve did not converge (relative residual {residual:.3e})")]
    Eigensolve { residual: f64 },

    #[error("probe footprint does not overlap the beam")]
    ProbeOffBeam,

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Fails with a domain error unless `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            name,
            format!("must be finite and >= 0, got {value}"),
        ))
    }
}
