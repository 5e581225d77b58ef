use std::fmt;

/// Errors raised anywhere in the toolkit.
///
/// Every variant maps to a stable, machine-readable [`code`](FprError::code)
/// that the HTTP service and the CLI surface verbatim.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[non_exhaustive]
pub enum FprError {
    /// A scalar argument fell outside its admissible range.
    #[error("{name} = {value} is outside the admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// A scalar argument was NaN or infinite.
    #[error("{name} must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    /// The Sellke-Berger bound only holds for p < 1/e.
    #[error("the Sellke-Berger bound holds only for p < 1/e (0.3679), got p = {0}")]
    SellkeBergerRange(f64),

    /// A sample had fewer than two observations.
    #[error("sample {group} has {len} observation(s); at least 2 are required")]
    SampleTooSmall { group: &'static str, len: usize },

    /// Both samples have zero within-group variance.
    #[error("degenerate data: the pooled standard deviation is zero")]
    DegenerateData,

    /// A root finder could not bracket a solution.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// Too few Monte Carlo draws landed in the p-value band.
    #[error("insufficient band occupancy: {observed} null p-values in the band, at least {required} required")]
    LowStatistics { observed: u64, required: u64 },

    /// A grid or range argument was empty or malformed.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Malformed input data (CSV, JSON).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl FprError {
    /// Stable identifier for clients.
    pub fn code(&self) -> ErrorCode {
        match self {
            FprError::OutOfRange { .. } => ErrorCode::OutOfRange,
            FprError::NonFinite { .. } => ErrorCode::NonFinite,
            FprError::SellkeBergerRange(_) => ErrorCode::SellkeBergerRange,
            FprError::SampleTooSmall { .. } => ErrorCode::SampleTooSmall,
            FprError::DegenerateData => ErrorCode::DegenerateData,
            FprError::NoSolution(_) => ErrorCode::NoSolution,
            FprError::LowStatistics { .. } => ErrorCode::LowStatistics,
            FprError::InvalidGrid(_) => ErrorCode::InvalidGrid,
            FprError::InvalidInput(_) => ErrorCode::InvalidInput,
        }
    }

    pub(crate) fn out_of_range(name: &'static str, value: f64, range: &'static str) -> Self {
        FprError::OutOfRange { name, value, range }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    OutOfRange,
    NonFinite,
    SellkeBergerRange,
    SampleTooSmall,
    DegenerateData,
    NoSolution,
    LowStatistics,
    InvalidGrid,
    InvalidInput,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::OutOfRange => "out_of_range",
            ErrorCode::NonFinite => "non_finite",
            ErrorCode::SellkeBergerRange => "sellke_berger_range",
            ErrorCode::SampleTooSmall => "sample_too_small",
            ErrorCode::DegenerateData => "degenerate_data",
            ErrorCode::NoSolution => "no_solution",
            ErrorCode::LowStatistics => "low_statistics",
            ErrorCode::InvalidGrid => "invalid_grid",
            ErrorCode::InvalidInput => "invalid_input",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub type Result<T, E = FprError> = std::result::Result<T, E>;

/// Checks `0 < value < 1`.
pub(crate) fn open_unit(name: &'static str, value: f64) -> Result<f64> {
    finite(name, value)?;
    if value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(FprError::out_of_range(name, value, "(0, 1)"))
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(FprError::NonFinite { name, value })
    }
}
