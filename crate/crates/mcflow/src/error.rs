use thiserror::Error;

/// Error type shared by all modules.
///
/// Exit-code mapping used by the binary: configuration/validation problems
/// (`InvalidGrid`, `InvalidConfig`, `CflViolation`, `Parse`) map to exit
/// code 3, failed verification checks to 1, CLI usage errors (handled by
/// clap) to 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("time step {dt} exceeds stability limit {max}")]
    CflViolation { dt: f64, max: f64 },

    #[error("field has no finite values")]
    AllEscaped,

    #[error("grids or snapshot times do not match: {0}")]
    Mismatch(String),

    #[error("initial ordering violated: min gap {0}")]
    OrderingViolated(f64),

    #[error("scheme instability: value {value} fell below floor {floor} at t={time}")]
    SchemeUnstable { value: f64, floor: f64, time: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
