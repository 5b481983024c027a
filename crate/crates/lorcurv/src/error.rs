use thiserror::Error;

/// Every failure the library reports. Variants are grouped so callers
/// can map them onto exit codes (domain rejection vs. input/IO).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite entry in input")]
    NonFinite,
    #[error("matrix is not symmetric (residual {0:e})")]
    NotSymmetric(f64),
    #[error("degenerate metric: |det| = {det:e} below tolerance, eigenvalues {eigenvalues:?}")]
    DegenerateMetric { det: f64, eigenvalues: [f64; 3] },
    #[error("metric has signature {signature}, expected (+,+,-); eigenvalues {eigenvalues:?}")]
    WrongSignature {
        signature: String,
        eigenvalues: [f64; 3],
    },
    #[error("singular matrix (det = {0:e})")]
    Singular(f64),
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("basis {basis} is not available for family {family}")]
    BasisMismatch { family: String, basis: String },
    #[error("invalid automorphism parameters: {0}")]
    InvalidAutomorphism(String),
    #[error("lightlike plane: Gram determinant {0:e}")]
    LightlikePlane(f64),
    #[error("vectors are not orthogonal: h(u,v) = {0:e}")]
    NotOrthogonal(f64),
    #[error("operator is not self-adjoint for J = diag(1,1,-1) (residual {0:e})")]
    NotSelfAdjoint(f64),
    #[error("parameter out of domain: {0}")]
    OutOfDomain(String),
    #[error("ambiguous pivot: {0}")]
    AmbiguousPivot(String),
    #[error("metrics belong to different families: {0} vs {1}")]
    FamilyMismatch(String, String),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by unreadable or malformed input rather than
    /// by a well-formed input the mathematics rejects.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Io(_)
                | Error::FamilyMismatch(..)
                | Error::NonFinite
                | Error::InvalidTolerance(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
