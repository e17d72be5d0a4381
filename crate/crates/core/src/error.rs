use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("n = {0} is even; the cyclic system is singular for even n")]
    EvenN(usize),

    #[error("cyclic solve produced a negative square: x[{index}] = {value:e}")]
    InfeasibleXi { index: usize, value: f64 },

    #[error("weighted cyclic solve produced a negative square: y[{index}] = {value:e}")]
    WeightedInfeasible { index: usize, value: f64 },

    #[error("off-diagonal entry at (row {row}, col {col}) is zero but is used as a divisor")]
    ZeroDivisor { row: usize, col: usize },

    #[error("not an isometry: residual {residual:e} at columns ({col_a}, {col_b})")]
    IsometryViolation { residual: f64, col_a: usize, col_b: usize },

    #[error("not bistochastic: {0}")]
    NotBistochastic(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence after {sweeps} sweeps")]
    NonConvergence { sweeps: usize },

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code for JSON error records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EvenN(_) => "EVEN_N",
            Error::InfeasibleXi { .. } => "INFEASIBLE_XI",
            Error::WeightedInfeasible { .. } => "WEIGHTED_INFEASIBLE",
            Error::ZeroDivisor { .. } => "ZERO_DIVISOR",
            Error::IsometryViolation { .. } => "ISOMETRY_VIOLATION",
            Error::NotBistochastic(_) => "NOT_BISTOCHASTIC",
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::FieldMismatch(_) => "FIELD_MISMATCH",
            Error::InvalidArgument(_) => "INVALID_ARGUMENT",
            Error::NonConvergence { .. } => "NON_CONVERGENCE",
            Error::Parse(_) => "PARSE_ERROR",
        }
    }

    /// Input was malformed, as opposed to a well-posed question with a negative answer.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::FieldMismatch(_)
                | Error::InvalidArgument(_)
                | Error::Parse(_)
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "error": { "code": self.code(), "message": self.to_string() } })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
