//! Special functions: log-gamma, the three-parameter Mittag–Leffler
//! function and the modified Bessel function of the first kind.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod gamma;
mod mittag_leffler;

pub use bessel::{bessel_i, bessel_i_scaled};
pub use gamma::{gamma, log_gamma};
pub use mittag_leffler::{ml2, ml3, MLSpec, MAX_SERIES_LOSS};

pub(crate) use bessel::ln_bessel_i;
pub(crate) use gamma::{ln_gamma_unchecked, rgamma_unchecked};
