use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside its admissible range.
    #[error("invalid {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    /// A scenario grid does not carry a node the filter needs (the default time).
    #[error("grid error: {0}")]
    Grid(String),

    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol:e} within depth {max_depth}")]
    Quadrature {
        a: f64,
        b: f64,
        tol: f64,
        max_depth: u32,
    },

    #[error("data error: {0}")]
    Data(String),

    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }
}
