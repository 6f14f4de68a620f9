use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Two vectors that must share a length do not.
    DimensionMismatch { expected: usize, found: usize },
    /// A value that must be finite was NaN or infinite.
    NonFinite,
    /// A probability fell outside `[0, 1]`.
    ProbabilityOutOfRange(f64),
    /// A round in which every expert assigned zero probability.
    AllZeroRound,
    /// A weight vector was negative somewhere or did not sum to one.
    NotOnSimplex { sum: f64 },
    /// Learning rates handed to the online correction increased.
    RateIncrease { current: f64, next: f64 },
    /// A parameter was outside its admissible range.
    InvalidParameter(&'static str),
    /// A bound was requested without one of the symbols it depends on.
    MissingParameter(&'static str),
    /// A schedule, learner, or generator string could not be parsed.
    Parse(alloc::string::String),
    /// Segment boundaries are not `1 = t_1 < t_2 < ... <= T`.
    InvalidSegments,
    /// The mixture solver's objective decreased between iterations.
    NonMonotoneSolver { before: f64, after: f64 },
    /// An empty stream was passed where rounds are required.
    EmptyStream,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NonFinite => f.write_str("non-finite value"),
            Error::ProbabilityOutOfRange(p) => write!(f, "probability {p} outside [0, 1]"),
            Error::AllZeroRound => f.write_str("every expert assigned probability zero"),
            Error::NotOnSimplex { sum } => write!(f, "vector is not on the simplex (sum {sum})"),
            Error::RateIncrease { current, next } => {
                write!(f, "learning rate increased from {current} to {next}")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::MissingParameter(what) => write!(f, "missing parameter: {what}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
            Error::InvalidSegments => f.write_str("segment boundaries must start at 1 and increase"),
            Error::NonMonotoneSolver { before, after } => {
                write!(f, "mixture objective decreased from {before} to {after}")
            }
            Error::EmptyStream => f.write_str("stream has no rounds"),
        }
    }
}

impl core::error::Error for Error {}
