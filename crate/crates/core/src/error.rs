use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or size combination that cannot describe a valid setup.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: String,
        found: String,
    },

    /// A matrix or state broke one of its structural invariants.
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    /// Mixing polynomial or step sizes do not keep the proximal operator positive definite.
    #[error("mixing assumption violated: {0}")]
    MixingAssumption(String),

    #[error("initial dual variable is not in the disagreement subspace (node sum norm {residual:e})")]
    InvalidDualInit { residual: f64 },

    /// Parameter selection found an empty feasible interval.
    #[error("infeasible parameter selection: {bound} ({detail})")]
    Infeasible { bound: &'static str, detail: String },

    #[error("iterates diverged at iteration {iteration}: {reason}")]
    Divergence { iteration: usize, reason: String },

    #[error("declared smoothness bound {declared:e} is below the empirical estimate {empirical:e}")]
    SmoothnessViolation { empirical: f64, declared: f64 },

    #[error("diagnostic unavailable: {0}")]
    UnsupportedDiagnostic(&'static str),

    #[error("runs are not comparable: {0}")]
    Comparability(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn dims(what: &'static str, expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            what,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// Process exit status for the command-line runner: 2 for bad input,
    /// 3 for infeasible parameters, 4 for divergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Parse(_)
            | Error::DimensionMismatch { .. }
            | Error::MixingAssumption(_)
            | Error::InvalidDualInit { .. }
            | Error::Comparability(_) => 2,
            Error::Infeasible { .. } => 3,
            Error::Divergence { .. } => 4,
            _ => 1,
        }
    }
}
