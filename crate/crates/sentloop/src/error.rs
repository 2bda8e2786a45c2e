//! Crate-wide error type with a stable mapping to process exit codes.

use thiserror::Error;

/// All failure modes surfaced by the library.
///
/// Every variant belongs to one of three categories, which the CLI maps to
/// exit codes: usage errors (1), data errors (2), and numeric or degenerate
/// errors (3). Success is 0.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or unusable command input: bad flag values, invalid
    /// ranges, non-finite parameters, mismatched argument shapes.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input header or layout does not match the documented schema.
    #[error("schema error: {0}")]
    Schema(String),

    /// The input stream contained no header and no rows at all. Distinct
    /// from a well-formed file whose rows were all rejected.
    #[error("empty input: no header or records found")]
    EmptyInput,

    /// A subject produced a series with no days.
    #[error("empty subject series: {0}")]
    EmptySubjectSeries(String),

    /// Not enough usable observations to fit or split.
    #[error("insufficient observations: have {have}, need at least {need}")]
    InsufficientObservations { have: usize, need: usize },

    /// The design matrix is numerically rank deficient.
    #[error("rank-deficient design matrix (condition number {condition_number:.3e})")]
    RankDeficient { condition_number: f64 },

    /// A perfectly collinear regressor makes the requested statistic
    /// undefined.
    #[error("perfect collinearity involving regressor {0}")]
    PerfectCollinearity(String),

    /// An input with zero variance makes the requested statistic undefined.
    #[error("zero variance in {0}")]
    ZeroVariance(String),

    /// A population too small or too concentrated to standardise.
    #[error("degenerate population: {0}")]
    DegeneratePopulation(String),

    /// A required prior-run artifact is missing.
    #[error("missing inputs: {}", .0.join(", "))]
    MissingInputs(Vec<String>),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for this error: 1 usage, 2 data, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) => 1,
            Error::Schema(_)
            | Error::EmptyInput
            | Error::EmptySubjectSeries(_)
            | Error::InsufficientObservations { .. }
            | Error::MissingInputs(_)
            | Error::Io(_)
            | Error::Json(_) => 2,
            Error::RankDeficient { .. }
            | Error::PerfectCollinearity(_)
            | Error::ZeroVariance(_)
            | Error::DegeneratePopulation(_) => 3,
        }
    }
}
