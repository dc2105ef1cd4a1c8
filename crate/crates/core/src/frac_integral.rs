//! Riemann–Liouville fractional integral of a counting path.
//!
//! For a step path `N(s) = Σ_j 1{s ≥ τ_j}` the integral
//! `(1/Γ(α)) ∫_0^t (t-s)^{α-1} N(s) ds` has the exact value
//! `Σ_{τ_j ≤ t} (t - τ_j)^α / Γ(α+1)`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::fpp_dist::FppParams;
use crate::moments::{mean_frac_integral, var_frac_integral_poisson, MomentReport};
use crate::path_sim::{run_fold, sample_fpp_path, CountingPath, SimConfig};
use crate::special_fn::ln_gamma_unchecked;
use crate::stats::Moments;

/// Order `α` and upper limit `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracIntegralSpec {
    pub alpha: f64,
    pub t: f64,
}

impl FracIntegralSpec {
    pub fn new(alpha: f64, t: f64) -> Result<Self> {
        let s = Self { alpha, t };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.alpha > 0.0 && self.alpha.is_finite(), "alpha must be positive, got {}", self.alpha);
        ensure!(self.t > 0.0 && self.t.is_finite(), "t must be positive, got {}", self.t);
        Ok(())
    }
}

/// Exact RL integral of order `spec.alpha` at time `spec.t`. A jump exactly
/// at `t` contributes zero.
pub fn rl_integral_of_path(path: &CountingPath, spec: &FracIntegralSpec) -> Result<f64> {
    spec.validate()?;
    ensure!(path.horizon() >= spec.t, "t = {} exceeds the path horizon {}", spec.t, path.horizon());
    Ok(rl_sum(path, spec))
}

fn rl_sum(path: &CountingPath, spec: &FracIntegralSpec) -> f64 {
    let FracIntegralSpec { alpha, t } = *spec;
    let upto = path.count_at(t);
    let jumps = &path.jump_times()[..upto];
    let sum: f64 = if alpha == 1.0 {
        jumps.iter().map(|&x| t - x).sum()
    } else {
        jumps.iter().map(|&x| (t - x).powf(alpha)).sum()
    };
    if alpha == 1.0 {
        sum
    } else {
        sum * (-ln_gamma_unchecked(alpha + 1.0)).exp()
    }
}

/// Monte Carlo mean and variance of the RL integral over `sim.n_paths`
/// paths of `N^ν`. The variance has a closed form only for `ν = 1`.
pub fn rl_integral_mc_moments(
    params: &FppParams,
    spec: &FracIntegralSpec,
    sim: &SimConfig,
) -> Result<(MomentReport, MomentReport)> {
    params.validate()?;
    spec.validate()?;
    let acc = run_fold(
        sim,
        Moments::new,
        |m, rng| {
            let path = sample_fpp_path(params, spec.t, rng)?;
            m.push(rl_sum(&path, spec));
            Ok(())
        },
        |a, b| a.merge(&b),
    )?;
    let mean = MomentReport::new(
        "mean_frac_integral",
        Some(mean_frac_integral(params, spec)),
        acc.mean(),
        acc.std_error_mean(),
        acc.count(),
    );
    let var_analytic = (params.nu == 1.0).then(|| var_frac_integral_poisson(params.lambda, spec.alpha, spec.t));
    let var =
        MomentReport::new("var_frac_integral", var_analytic, acc.variance(), acc.std_error_variance(), acc.count());
    Ok((mean, var))
}
