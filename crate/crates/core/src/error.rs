use thiserror::Error;

use crate::quadrature::Estimate;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("series did not converge after {terms} terms (last relative term {last_rel:.3e})")]
    NonConvergence { terms: usize, last_rel: f64 },

    #[error("result overflows the f64 range: {0}")]
    Overflow(String),

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("quadrature tolerance not met: value {} with error estimate {}", .0.value, .0.error)]
    ToleranceNotMet(Estimate),

    #[error("empty input")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err($crate::Error::InvalidParam(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
