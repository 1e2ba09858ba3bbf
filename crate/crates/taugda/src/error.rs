use thiserror::Error;

/// Failures shared by every module.
///
/// The CLI maps `Usage` to exit 2, the precondition family to exit 3 and the
/// numerical family to exit 4 (see [`Error::exit_code`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("matrix must be square, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate point: {0}")]
    Degenerate(String),
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("inertia mismatch: {0}")]
    InertiaMismatch(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Stable snake_case tag for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Usage(_) => "usage",
            Error::NonSquare { .. } => "non_square",
            Error::Dimension(_) => "dimension",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Precondition(_) => "precondition",
            Error::Degenerate(_) => "degenerate",
            Error::NonConvergence(_) => "non_convergence",
            Error::NonFinite(_) => "non_finite",
            Error::InertiaMismatch(_) => "inertia_mismatch",
            Error::Io(_) => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::NonSquare { .. }
            | Error::Dimension(_)
            | Error::InvalidParameter(_)
            | Error::Precondition(_)
            | Error::Degenerate(_) => 3,
            Error::NonConvergence(_)
            | Error::NonFinite(_)
            | Error::InertiaMismatch(_)
            | Error::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
