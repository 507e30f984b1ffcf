use std::io;

use thiserror::Error;

/// Errors raised by raster, filter, fusion and metric routines.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes, band counts or scale ratios that do not line up.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// An argument outside its documented domain.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// A non-finite or otherwise unusable intermediate value.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// Malformed file contents.
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! dim_err {
    ($($arg:tt)*) => { $crate::error::Error::Dimension(format!($($arg)*)) };
}
macro_rules! param_err {
    ($($arg:tt)*) => { $crate::error::Error::Parameter(format!($($arg)*)) };
}
pub(crate) use dim_err;
pub(crate) use param_err;
