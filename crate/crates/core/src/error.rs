use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sample is empty")]
    EmptySample,

    #[error("direction is not a unit vector (norm {norm})")]
    NotUnitVector { norm: f64 },

    #[error("exhaustive nets are only available for d <= 3 (got d = {dim})")]
    ExhaustiveNetUnsupported { dim: usize },

    #[error("no direction has a positive empirical second moment")]
    DegenerateKappa,

    #[error("rank {r} out of range 1..={max}")]
    RankOutOfRange { r: usize, max: usize },

    #[error("normal system is singular beyond the ridge floor")]
    SingularSystem,

    #[error("eigendecomposition did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error(
        "bound B is infinite: the certificate regime is unavailable (8 zeta(sigma) > sqrt(n))"
    )]
    InfiniteBound,

    #[error("{which} is not an orthogonal projector (residual {residual:.3e})")]
    NotProjector { which: &'static str, residual: f64 },

    #[error("ambiguous eigenvalue classification at {eigenvalue}: {reason}")]
    AmbiguousClassification { eigenvalue: f64, reason: String },

    #[error("projector ranks differ ({p} vs {q})")]
    RankMismatch { p: usize, q: usize },

    #[error("invariant violated: {0}")]
    InvariantViolated(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Config(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Whether the failure is numerical rather than a problem with the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem
                | Error::ConvergenceFailure { .. }
                | Error::InfiniteBound
                | Error::AmbiguousClassification { .. }
                | Error::InvariantViolated(_)
        )
    }

    /// Process exit code used by the command line tool: 1 for validation
    /// errors, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            2
        } else {
            1
        }
    }
}
