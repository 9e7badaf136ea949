//! Crate-wide error type.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by data ingestion, inference, and the rolling pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    // --- ingestion / validation ---
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed row at line {line}: {reason}")]
    MalformedRow {
        path: PathBuf,
        line: u64,
        reason: String,
    },
    #[error("{path}: empty file")]
    EmptyFile { path: PathBuf },
    #[error("{path}: missing required column {column}")]
    MissingColumn { path: PathBuf, column: String },
    #[error("{path}: missing value at line {line}, column {column}")]
    MissingValue {
        path: PathBuf,
        line: u64,
        column: String,
    },
    #[error("conflicting duplicate for {key}: {first} vs {second}")]
    ConflictingDuplicate {
        key: String,
        first: f64,
        second: f64,
    },
    #[error("duplicate GHG record for firm {firm}, fiscal year {fiscal_year}")]
    DuplicateGhgRecord { firm: String, fiscal_year: i32 },
    #[error("nonpositive revenue {revenue} for firm {firm}, fiscal year {fiscal_year}")]
    NonpositiveRevenue {
        firm: String,
        fiscal_year: i32,
        revenue: f64,
    },
    #[error("negative emissions {emissions} for firm {firm}, fiscal year {fiscal_year}")]
    NegativeEmissions {
        firm: String,
        fiscal_year: i32,
        emissions: f64,
    },
    #[error("calendar is empty or not strictly increasing")]
    BadCalendar,
    #[error("{0}")]
    InvalidInput(String),

    // --- windowing / universe formation ---
    #[error("{date} is not a trading date")]
    NotATradingDate { date: chrono::NaiveDate },
    #[error("empty evaluation window at {eval_date} (horizon {horizon} months)")]
    EmptyWindow {
        eval_date: chrono::NaiveDate,
        horizon: u32,
    },
    #[error("universe of {size} firms is too small (minimum {min})")]
    UniverseTooSmall { size: usize, min: usize },
    #[error("quantiles must satisfy 0 < lower < upper < 1, got ({lower}, {upper})")]
    InvalidQuantiles { lower: f64, upper: f64 },
    #[error("peer group would be empty (quantile {lower_q} of {size} firms)")]
    EmptyPeerGroup { lower_q: f64, size: usize },
    #[error("green and brown groups overlap ({count} shared firms); intensities are degenerate")]
    OverlappingGroups { count: usize },

    // --- numerical inference ---
    #[error("need T > K+1 observations, got T = {t} with K+1 = {k_plus_1}")]
    TooFewObservations { t: usize, k_plus_1: usize },
    #[error("design matrix is rank deficient (condition number {cond:.3e})")]
    RankDeficient { cond: f64 },
    #[error("bandwidth weights are all zero")]
    DegenerateWeights,
    #[error("series too short for bandwidth selection (T = {t}, need at least {min})")]
    SeriesTooShort { t: usize, min: usize },
    #[error("T = {t} too small to fit VAR(1) prewhitening on {m} score columns (need {min})")]
    VarTooShort { t: usize, m: usize, min: usize },
    #[error("recoloring matrix I - A is singular after clamping")]
    SingularRecoloring,
    #[error("coefficient index {index} out of range (K+1 = {k_plus_1})")]
    IndexOutOfRange { index: usize, k_plus_1: usize },

    // --- screening / aggregation ---
    #[error("too few usable p-values ({n}, minimum {min})")]
    TooFewPValues { n: usize, min: usize },
    #[error("no peers could be tested for stock {stock}")]
    AllPeersExcluded { stock: String },
    #[error("all equal-exposure ratios missing for the group-month")]
    AllRatiosMissing,
    #[error("need at least {min} non-missing points to fit a trend, got {n}")]
    TooFewTrendPoints { n: usize, min: usize },
    #[error("no valid evaluation months in the configured range")]
    NoValidMonths,

    // --- configuration ---
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown stock {0}")]
    UnknownStock(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the inputs.
    ///
    /// The CLI maps these to exit code 2 and everything else to exit code 1.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TooFewObservations { .. }
                | Error::RankDeficient { .. }
                | Error::DegenerateWeights
                | Error::SeriesTooShort { .. }
                | Error::VarTooShort { .. }
                | Error::SingularRecoloring
                | Error::IndexOutOfRange { .. }
                | Error::TooFewPValues { .. }
                | Error::AllPeersExcluded { .. }
                | Error::AllRatiosMissing
                | Error::TooFewTrendPoints { .. }
                | Error::NoValidMonths
        )
    }
}
