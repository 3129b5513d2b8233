//! Error types shared across the toolkit.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Toolkit-wide error type.
///
/// Variants are grouped so the CLI can map them onto distinct exit codes:
/// configuration/usage problems, data problems, and numerical failures.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its mathematical domain (e.g. `d <= 0`).
    #[error("domain error: {0}")]
    Domain(String),

    /// An input sequence has the wrong length for the requested operation.
    #[error("length error: {0}")]
    Length(String),

    /// The caller asked for something inconsistent (empty grid, bad range, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// A linear system arising from a fit is singular.
    #[error("rank error: {0}")]
    Rank(String),

    /// A nonlinear fit failed to locate a minimum.
    #[error("optimization error: {0}")]
    Optimization(String),

    /// A statistic is degenerate (e.g. zero self-normalizer) and has no value.
    #[error("degenerate statistic: {0}")]
    Degenerate(String),

    /// Too many subsample blocks were degenerate to form a reference distribution.
    #[error("distribution error: {0}")]
    Distribution(String),

    /// The de-biasing calibration could not be carried out.
    #[error("debias error: {0}")]
    Debias(String),

    /// Too many Monte Carlo replications failed inside one experiment cell.
    #[error("cell error: {0}")]
    Cell(String),

    /// A dataset or configuration file failed validation.
    #[error("data error: {0}")]
    Data(String),

    /// Configuration file parsing/validation failure.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config/usage, 3 data/io, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Config(_) => 2,
            Error::Data(_) | Error::Io(_) | Error::Csv(_) => 3,
            Error::Domain(_)
            | Error::Length(_)
            | Error::Rank(_)
            | Error::Optimization(_)
            | Error::Degenerate(_)
            | Error::Distribution(_)
            | Error::Debias(_)
            | Error::Cell(_) => 4,
        }
    }
}
