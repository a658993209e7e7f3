//! Error types and the exit-code contract shared by the library and the CLI.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, QcurvError>;

#[derive(Debug, Error)]
pub enum QcurvError {
    /// Dimension outside the meaningful range (n = 0 or absurdly large).
    #[error("invalid dimension n = {0}: expected 1 <= n <= 20")]
    InvalidDimension(i64),

    /// Dimensions 1 and 2 are rejected up front: the constant negative
    /// Q-curvature equation admits no finite-volume solution there, smooth
    /// or singular, so there is nothing to solve for.
    #[error(
        "nonexistence regime: for n = {0} there are no finite-volume solutions \
         of the constant negative Q-curvature equation; the solver requires n >= 3"
    )]
    NonexistenceRegime(u32),

    /// Radial polynomial degree 2j exceeds the admissible bound n - 1.
    #[error("polynomial degree {degree} exceeds the bound n - 1 = {bound} for dimension n = {n}")]
    DegreeBound { degree: usize, bound: u32, n: u32 },

    /// Parameter combination covered by no admissible asymptotic case.
    #[error("uncovered parameter regime: {0}")]
    UncoveredRegime(String),

    /// Malformed user input (config files, option ranges, bad radii, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Numerical failure: degenerate mass, stalled line search, divergent
    /// auxiliary quadrature.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// All mass-integrand terms underflowed; the problem data is degenerate
    /// at this resolution.
    #[error("degenerate problem: the mass integrand underflowed at every quadrature node")]
    DegenerateMass,

    /// A verification sub-check exceeded its tolerance.
    #[error("verification failure: {0}")]
    Verification(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Config(String),
}

impl QcurvError {
    /// Exit-code contract: 1 = input, 2 = numerical failure, 3 = verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            QcurvError::InvalidDimension(_)
            | QcurvError::NonexistenceRegime(_)
            | QcurvError::DegreeBound { .. }
            | QcurvError::UncoveredRegime(_)
            | QcurvError::InvalidInput(_)
            | QcurvError::Io(_)
            | QcurvError::Config(_) => 1,
            QcurvError::Numerical(_) | QcurvError::DegenerateMass => 2,
            QcurvError::Verification(_) => 3,
        }
    }
}
