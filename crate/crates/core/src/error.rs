use thiserror::Error;

/// Errors produced by the planted balls-into-bins library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid planting: {0}")]
    InvalidPlanting(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("integer overflow while computing {0}")]
    ArithmeticOverflow(&'static str),

    #[error("planting has k = 0: planted and standard distributions coincide")]
    DegeneratePlanting,

    #[error("scaled ball count {requested} exceeds the maximum {max}")]
    ScaleTooLarge { requested: f64, max: u64 },

    #[error("m = {m} balls is fewer than the k = {k} planted balls")]
    NotEnoughBalls { m: u64, k: u64 },

    #[error("q-values are undefined for a configuration with no balls")]
    UndefinedForEmpty,

    #[error("dimension mismatch: planting has {planting} bins, configuration has {configuration}")]
    DimensionMismatch {
        planting: usize,
        configuration: usize,
    },

    #[error("power {0} is not supported (expected 1..=4)")]
    UnsupportedPower(u32),

    #[error("the {0} statistic has no decision threshold")]
    NoThresholdDefined(&'static str),

    #[error("error term undefined: bin {bin} is empty but has {planted} planted balls")]
    UndefinedErrorTerm { bin: usize, planted: u64 },

    #[error("enumeration of {count} configurations exceeds the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("scale constant c must be positive, got {0}")]
    InvalidScale(f64),

    #[error("predicted variance is zero; cannot standardize")]
    DegenerateStandardization,

    #[error("invalid sample count {got}: at least {min} required")]
    InvalidSampleCount { got: u64, min: u64 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed planting file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
