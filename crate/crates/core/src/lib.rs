//! Fractional Poisson process: special functions, distributions, exact path
//! simulation, Riemann–Liouville integrals of paths and their moments.
//!
//! Modules follow the computation stack. [`special_fn`] and [`quadrature`]
//! are numerical building blocks; [`fpp_dist`] holds the analytic laws;
//! [`path_sim`], [`frac_integral`] and [`moments`] pair closed forms with
//! Monte Carlo estimators; [`skellam`] covers the difference of two Poisson
//! processes.

pub mod error;
pub mod fpp_dist;
pub mod frac_integral;
pub mod moments;
pub mod path_sim;
pub mod quadrature;
pub mod skellam;
pub mod special_fn;
pub mod stats;

pub use error::{Error, Result};
pub use fpp_dist::{BivariateQuery, FppParams};
pub use frac_integral::FracIntegralSpec;
pub use moments::{MomentKind, MomentReport};
pub use path_sim::{CountingPath, SimConfig, SimRng};
pub use quadrature::{Estimate, QuadSpec};
pub use skellam::SkellamParams;
pub use special_fn::MLSpec;
