use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions {height}x{width}")]
    InvalidDims { height: usize, width: usize },

    #[error("grid has {sites} sites, exhaustive enumeration is capped at {cap}")]
    DimsTooLarge { sites: usize, cap: usize },

    #[error("block of {0} rows exceeds the column state cap of {max} rows", max = crate::bp::MAX_BLOCK_ROWS)]
    TooManyRows(usize),

    #[error("boundary row has length {got}, block width is {expected}")]
    BoundaryLength { expected: usize, got: usize },

    #[error("column index {index} out of range for width {width}")]
    ColumnOutOfRange { index: usize, width: usize },

    #[error("previous column state must be given exactly when the column index is positive")]
    PrevStateMismatch,

    #[error("symbol {symbol} has zero coding probability")]
    ZeroProbability { symbol: usize },

    #[error("corrupt stream: {0}")]
    CorruptStream(&'static str),

    #[error("malformed bitstream: {0}")]
    Bitstream(String),

    #[error("malformed image: {0}")]
    Image(String),

    #[error("invalid scheme configuration: {0}")]
    Scheme(String),

    #[error("no calibrated parameter for sidedness {sidedness}, {n_rows} rows")]
    MissingCalibration { sidedness: u8, n_rows: usize },

    #[error("moment target {target} outside the achievable range [{lo}, {hi}]")]
    BracketFailure { target: f64, lo: f64, hi: f64 },

    #[error("moment standard error {stderr} exceeds a third of the tolerance {tolerance}")]
    InsufficientSamples { stderr: f64, tolerance: f64 },

    #[error("malformed table: {0}")]
    Table(String),

    #[error("malformed calibration file: {0}")]
    Calibration(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
