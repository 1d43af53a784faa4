use thiserror::Error;

/// Every failure the toolkit reports. The CLI maps these to exit code 3.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported scale: {0}")]
    UnsupportedScale(String),
    #[error("unsupported kind: {0}")]
    UnsupportedKind(String),
    #[error("not in space: {0}")]
    NotInSpace(String),
    #[error("no embedding: {0}")]
    NoEmbedding(String),
    #[error("divergent part: {0}")]
    DivergentPart(String),
    #[error("inadmissible term: {0}")]
    InadmissibleTerm(String),
    #[error("gamma pole at {0}")]
    Pole(f64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no contraction: q = {0} >= 1, use split mode")]
    NoContraction(f64),
    #[error("no convergence after {0} iterations")]
    NotConverged(usize),
    #[error("singular system: {0}")]
    SingularSystem(String),
    #[error("contraction violation: {0}")]
    ContractionViolation(String),
    #[error("fit degenerate: {0}")]
    FitDegenerate(String),
}

impl Error {
    /// Stable snake_case name used in CLI error payloads.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::UnsupportedScale(_) => "unsupported_scale",
            Error::UnsupportedKind(_) => "unsupported_kind",
            Error::NotInSpace(_) => "not_in_space",
            Error::NoEmbedding(_) => "no_embedding",
            Error::DivergentPart(_) => "divergent_part",
            Error::InadmissibleTerm(_) => "inadmissible_term",
            Error::Pole(_) => "pole_error",
            Error::Domain(_) => "domain_error",
            Error::NoContraction(_) => "no_contraction",
            Error::NotConverged(_) => "not_converged",
            Error::SingularSystem(_) => "singular_system",
            Error::ContractionViolation(_) => "contraction_violation",
            Error::FitDegenerate(_) => "fit_degenerate",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
