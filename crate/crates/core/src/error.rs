use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The point is on or outside the boundary of the bounded domain.
    #[error("point outside the open unit ball: spectral norm {spectral_norm}")]
    Boundary { spectral_norm: f64 },

    /// A scalar function is undefined at one of the eigenvalues.
    #[error("function undefined at eigenvalue {eigenvalue}")]
    Domain { eigenvalue: f64 },

    /// Eigenvalue beyond the range where a map is defined (e.g. tan past pi/2).
    #[error("eigenvalue {eigenvalue} beyond the range limit {limit}")]
    Range { eigenvalue: f64, limit: f64 },

    #[error("operator is not positive definite: smallest eigenvalue {min_eigenvalue}")]
    NotPositive { min_eigenvalue: f64 },

    #[error(
        "singular value decomposition failed for a {rows}x{cols} matrix (max |entry| {max_abs})"
    )]
    Svd {
        rows: usize,
        cols: usize,
        max_abs: f64,
    },

    #[error("finite-difference stencil left the domain at coordinate {axis}: {source}")]
    Stencil {
        axis: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short stable code used in machine-readable output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ShapeMismatch { .. } => "shape_mismatch",
            Error::NonFinite(_) => "non_finite",
            Error::Boundary { .. } => "boundary",
            Error::Domain { .. } => "domain",
            Error::Range { .. } => "range",
            Error::NotPositive { .. } => "not_positive",
            Error::Svd { .. } => "svd",
            Error::Stencil { .. } => "stencil",
            Error::Invalid(_) => "invalid",
            Error::Parse(_) => "parse",
        }
    }
}
