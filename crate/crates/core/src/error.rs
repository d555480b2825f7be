//! Error type shared by all modules.
//!
//! Each variant carries a stable name (see [`Error::name`]) so that callers
//! such as the CLI can report machine-readable error identifiers and map
//! them to exit codes.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Scenario id outside `a..=l` (or not present in an override file).
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    /// Requested a sample of size zero.
    #[error("sample size must be at least 1")]
    InvalidSize,
    /// A sample was empty or contained non-finite values.
    #[error("invalid sample: {0}")]
    InvalidSample(String),
    /// Distribution parameters violate their constraints.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    /// Both sample variances are zero where a positive variance is required.
    #[error("zero variance")]
    ZeroVariance,
    /// All pooled observations are identical; the rank statistic is undefined.
    #[error("degenerate data: all pooled values identical")]
    DegenerateData,
    /// The mean constraint has no solution with positive probabilities
    /// (target mean outside the open sample range).
    #[error("infeasible constraint: mean outside the open sample range")]
    Infeasible,
    /// The open sample ranges do not intersect; EL/EEL have no solution.
    #[error("no overlap between sample ranges")]
    NoOverlap,
    /// A solver failed to reach its tolerance within the iteration cap.
    #[error("solver did not converge: {0}")]
    NoConvergence(String),
    /// Tilting exponents left the representable range; the samples are
    /// pathologically separated.
    #[error("numeric overflow in exponential tilting")]
    NumericOverflow,
    /// Argument outside a function's domain.
    #[error("domain error: {0}")]
    DomainError(String),
    /// An exact computation would exceed the configured table/enumeration cap.
    #[error("exact computation exceeds cap ({0} > {1})")]
    CapExceeded(u128, u128),
    /// Exact WMW p-values are undefined for tied data.
    #[error("ties present: exact WMW p-value is not defined")]
    TiesPresent,
    /// Malformed input file; names the offending line and column.
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    /// A group in a batch matrix has fewer than two members.
    #[error("group error: {0}")]
    GroupError(String),
    /// An operation received an empty input vector.
    #[error("empty input")]
    EmptyInput,
    /// Configuration failed validation.
    #[error("invalid configuration: {0}")]
    Validation(String),
    /// Underlying I/O failure.
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    /// Stable identifier for scripting (printed on stderr by the CLI).
    pub fn name(&self) -> &'static str {
        match self {
            Error::UnknownScenario(_) => "UnknownScenario",
            Error::InvalidSize => "InvalidSize",
            Error::InvalidSample(_) => "InvalidSample",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::ZeroVariance => "ZeroVariance",
            Error::DegenerateData => "DegenerateData",
            Error::Infeasible => "Infeasible",
            Error::NoOverlap => "NoOverlap",
            Error::NoConvergence(_) => "NoConvergence",
            Error::NumericOverflow => "NumericOverflow",
            Error::DomainError(_) => "DomainError",
            Error::CapExceeded(_, _) => "CapExceeded",
            Error::TiesPresent => "TiesPresent",
            Error::ParseError { .. } => "ParseError",
            Error::GroupError(_) => "GroupError",
            Error::EmptyInput => "EmptyInput",
            Error::Validation(_) => "Validation",
            Error::Io { .. } => "Io",
        }
    }

    /// True for errors raised by a numerical solver rather than by input
    /// validation or I/O.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::Infeasible
                | Error::NoOverlap
                | Error::NoConvergence(_)
                | Error::NumericOverflow
                | Error::ZeroVariance
                | Error::DegenerateData
                | Error::TiesPresent
        )
    }
}
