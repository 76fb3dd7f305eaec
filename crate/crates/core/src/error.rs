/// Errors produced by the library layer.
///
/// `InvalidParameter` covers domain violations in requests (caller bugs or
/// bad user input); `NumericalRange` covers values that leave the range
/// representable in f64 (overflowing barrier positions, zoom windows below
/// floating-point resolution); `InsufficientData` covers inputs too short
/// for the requested operation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("numerical range exceeded: {0}")]
    NumericalRange(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::NumericalRange(msg.into())
    }

    pub(crate) fn insufficient(msg: impl Into<String>) -> Self {
        Error::InsufficientData(msg.into())
    }
}
