use thiserror::Error;

/// Toolkit-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("schema error: missing column `{0}`")]
    MissingColumn(String),

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("data gap at {date}: column `{column}` has no value")]
    DataGap { date: String, column: String },

    #[error("insufficient data: need {needed}, have {have}")]
    InsufficientData { needed: usize, have: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("optimizer did not converge after {iterations} iterations (best objective {best:.6e})")]
    NonConvergence { iterations: usize, best: f64 },

    #[error("collinear design matrix: {0}")]
    Collinear(String),

    #[error("training diverged at epoch {epoch}: loss is not finite")]
    Divergence { epoch: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 2 usage, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 2,
            Error::Io { .. }
            | Error::MissingColumn(_)
            | Error::Parse { .. }
            | Error::Integrity(_)
            | Error::DataGap { .. }
            | Error::InsufficientData { .. } => 3,
            Error::Degenerate(_)
            | Error::Numerical(_)
            | Error::NonConvergence { .. }
            | Error::Collinear(_)
            | Error::Divergence { .. } => 4,
        }
    }
}
