use std::fmt;

use optomech_core::Error;

/// CLI failure classes. Each maps to a fixed process exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad config, malformed input file, or out-of-domain parameter (exit 1).
    Input(String),
    /// The requested operating point is dynamically unstable (exit 2).
    Unstable { margin: f64, detail: String },
    /// The analysis chain could not produce a result (exit 3).
    Analysis(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Unstable { .. } => 2,
            CliError::Analysis(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Unstable { margin, detail } => {
                write!(f, "unstable: margin {margin:.6e} rad/s; {detail}")
            }
            CliError::Analysis(m) => write!(f, "analysis failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unstable { margin } => CliError::Unstable {
                margin,
                detail: e.to_string(),
            },
            Error::Calibration(_)
            | Error::FloorModel(_)
            | Error::EmptyBand { .. }
            | Error::Eigensolve { .. }
            | Error::Singular(_) => CliError::Analysis(e.to_string()),
            Error::Domain { .. }
            | Error::Unit { .. }
            | Error::ProbeOffBeam
            | Error::Parse { .. }
            | Error::Io(_) => CliError::Input(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
