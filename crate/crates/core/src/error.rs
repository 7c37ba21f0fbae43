use thiserror::Error;

/// Errors raised by the affine Grassmannian routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraffError {
    #[error("DimensionError: {0}")]
    Dimension(String),

    #[error("RankDeficient: expected rank {expected}, numerical rank {found}")]
    RankDeficient { expected: usize, found: usize },

    /// The (k+1)-plane lies in the hyperplane at infinity, i.e. in `Gr(k+1, n)`.
    #[error("NotAFlat: last row norm {last_row_norm:e} is below tolerance")]
    NotAFlat { last_row_norm: f64 },

    #[error("SingularPair: smallest singular value {sigma_min:e} is below tolerance")]
    SingularPair { sigma_min: f64 },

    #[error("InvalidFlag: {0}")]
    InvalidFlag(String),

    #[error("UnsupportedKind: {0} has no metric on flats of all dimensions")]
    UnsupportedKind(String),

    #[error("NotSeparable: {0}")]
    NotSeparable(String),

    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),

    #[error("InternalError: {0}")]
    Internal(String),
}

impl GraffError {
    /// Short variant name, used by the CLI in error messages.
    pub fn name(&self) -> &'static str {
        match self {
            GraffError::Dimension(_) => "DimensionError",
            GraffError::RankDeficient { .. } => "RankDeficient",
            GraffError::NotAFlat { .. } => "NotAFlat",
            GraffError::SingularPair { .. } => "SingularPair",
            GraffError::InvalidFlag(_) => "InvalidFlag",
            GraffError::UnsupportedKind(_) => "UnsupportedKind",
            GraffError::NotSeparable(_) => "NotSeparable",
            GraffError::InvalidParameter(_) => "InvalidParameter",
            GraffError::Internal(_) => "InternalError",
        }
    }

    /// Domain errors are well-posed inputs without an answer; everything else
    /// is a malformed request.
    pub fn is_domain_error(&self) -> bool {
        matches!(
            self,
            GraffError::NotSeparable(_)
                | GraffError::SingularPair { .. }
                | GraffError::NotAFlat { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, GraffError>;

pub(crate) fn dim_err(msg: impl Into<String>) -> GraffError {
    GraffError::Dimension(msg.into())
}
