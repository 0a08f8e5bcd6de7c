use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto process exit
/// codes: anything in here (except `Io`) is exit 1, `Io` is exit 3; the
/// verify command reserves exit 2 for a numerical cross-check failure,
/// which is not an `Error` at all but a reported outcome.
#[derive(Debug, Error)]
pub enum Error {
    /// gamma is too close to omega0; the two-exponential basis degenerates
    /// at critical damping and every downstream formula divides by zero.
    #[error("critical damping: gamma = {gamma} is within {rel:e} (relative) of omega0 = {omega0}; the exponential basis degenerates there")]
    CriticalDamping { omega0: f64, gamma: f64, rel: f64 },

    #[error("invalid {field}: {message}")]
    Validation { field: &'static str, message: String },

    /// |mu2 - mu1| underflowed; kick matrices divide by this gap.
    #[error("degenerate basis: |mu2 - mu1| = {gap:e} is below {min:e}")]
    DegenerateBasis { gap: f64, min: f64 },

    #[error("{what} out of range: {message}")]
    OutOfRange {
        what: &'static str,
        message: String,
    },

    /// A closed form was requested for a damping regime it does not cover.
    #[error("wrong regime: {operation} requires the {expected} regime, config is {actual}")]
    WrongRegime {
        operation: &'static str,
        expected: &'static str,
        actual: &'static str,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// Kick instants must land exactly on integrator step boundaries, and
    /// below 100 steps per interval the step error is not plausibly small.
    #[error("integrator step too coarse: {steps} steps per kick interval, minimum is {min}")]
    StepTooCoarse { steps: u32, min: u32 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("unknown key '{key}' on line {line}")]
    UnknownKey { key: String, line: usize },

    #[error("line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
