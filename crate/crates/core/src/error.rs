use thiserror::Error;

/// Everything that can go wrong between parsing a word and printing a verdict.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("monodromy {word:?} is not hyperbolic (|trace| = {trace} <= 2)")]
    NotHyperbolic { word: String, trace: i64 },

    #[error("word uses generator {0}, which the endomorphism does not act on")]
    UnknownGenerator(usize),

    #[error("endomorphism is not built from L/R/i letters, so no inverse is known")]
    NoKnownInverse,

    #[error("presentation has {generators} generators and {relators} relators; need deficiency one with at least two generators")]
    Deficiency { generators: usize, relators: usize },

    #[error("abelianization map rejected: {0}")]
    Abelianization(String),

    #[error("representation does not fit the presentation: {0}")]
    Representation(String),

    #[error("determinant interpolation failed validation (relative residual {residual:.3e})")]
    Interpolation { residual: f64 },

    #[error("polynomial division is not exact (relative remainder {residual:.3e})")]
    NotDivisible { residual: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("Newton iteration found no root from {starts} starts")]
    NoRoots { starts: usize },

    #[error("no non-real, non-degenerate trace solution was found")]
    NoSolution,

    #[error("trace triple has tr(ab) = 0; the normal form is undefined")]
    DegenerateTrace,

    #[error("meridian solution space has dimension {0}, expected 1")]
    MeridianNullity(usize),

    #[error("{what}: residual {residual:.3e} exceeds tolerance")]
    Residual { what: String, residual: f64 },

    #[error("{what}: expected dimension {expected}, found {found}")]
    Dimension { what: String, expected: usize, found: usize },

    #[error("restricted action leaks out of the invariant subspace (residual {0:.3e})")]
    InvariantLeak(f64),

    #[error("solution index {index} out of range ({count} solutions)")]
    SolutionIndex { index: usize, count: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Input errors are the user's to fix; everything else is numerical.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::NotHyperbolic { .. }
                | Error::UnknownGenerator(_)
                | Error::NoKnownInverse
                | Error::Deficiency { .. }
                | Error::Abelianization(_)
                | Error::Representation(_)
                | Error::SolutionIndex { .. }
                | Error::Io(_)
                | Error::Json(_)
        )
    }

    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse { position, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
