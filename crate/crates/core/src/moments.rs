//! Closed-form moments of the fractional integral `𝒩^{α,ν}(t)` and of the
//! integrated powers of the Poisson process, with Monte Carlo estimators
//! that check them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::fpp_dist::FppParams;
use crate::frac_integral::FracIntegralSpec;
use crate::path_sim::{run_fold, sample_conditioned_path, sample_fpp_path, CountingPath, SimConfig};
use crate::special_fn::{ln_gamma_unchecked, rgamma_unchecked};
use crate::stats::Moments;

/// Analytic value (when one exists) next to its Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub name: String,
    pub analytic: Option<f64>,
    pub mc_estimate: f64,
    pub mc_std_error: f64,
    pub n_samples: u64,
    /// `(mc_estimate - analytic) / mc_std_error`.
    pub z_score: Option<f64>,
}

impl MomentReport {
    pub fn new(name: &str, analytic: Option<f64>, mc_estimate: f64, mc_std_error: f64, n_samples: u64) -> Self {
        let z_score = analytic.map(|a| {
            let d = mc_estimate - a;
            if mc_std_error > 0.0 {
                d / mc_std_error
            } else if d == 0.0 {
                0.0
            } else {
                d.signum() * f64::INFINITY
            }
        });
        Self { name: name.to_string(), analytic, mc_estimate, mc_std_error, n_samples, z_score }
    }

    /// True when no analytic value is available or `|z| ≤ limit`.
    pub fn within(&self, limit: f64) -> bool {
        self.z_score.is_none_or(|z| z.abs() <= limit)
    }
}

fn rgamma(x: f64) -> f64 {
    rgamma_unchecked(x)
}

/// `E 𝒩^{α,ν}(t) = λ t^{α+ν} / Γ(α+ν+1)`.
pub fn mean_frac_integral(params: &FppParams, spec: &FracIntegralSpec) -> f64 {
    let p = spec.alpha + params.nu;
    params.lambda * spec.t.powf(p) * rgamma(p + 1.0)
}

/// `Var 𝒩^{α}(t) = λ t^{2α+1} / ((2α+1) Γ²(α+1))` for the Poisson process.
pub fn var_frac_integral_poisson(lambda: f64, alpha: f64, t: f64) -> f64 {
    let g = rgamma(alpha + 1.0);
    lambda * t.powf(2.0 * alpha + 1.0) * g * g / (2.0 * alpha + 1.0)
}

/// `E[𝒩^{α}(t)]² = Var + λ² t^{2α+2} / Γ²(α+2)` for the Poisson process.
pub fn second_moment_frac_integral_poisson(lambda: f64, alpha: f64, t: f64) -> f64 {
    let g = rgamma(alpha + 2.0);
    var_frac_integral_poisson(lambda, alpha, t) + (lambda * t.powf(alpha + 1.0) * g).powi(2)
}

/// `E[𝒩^α(t) | N(t) = n] = n t^α / Γ(α+2)`.
pub fn cond_mean_frac_integral(n: u64, alpha: f64, t: f64) -> f64 {
    n as f64 * t.powf(alpha) * rgamma(alpha + 2.0)
}

/// `E[(𝒩^α(t))² | N(t) = n]`.
pub fn cond_second_moment_frac_integral(n: u64, alpha: f64, t: f64) -> f64 {
    let nf = n as f64;
    let t2a = t.powf(2.0 * alpha);
    let ln_first = std::f64::consts::LN_2 + ln_gamma_unchecked(2.0 * alpha)
        - alpha.ln()
        - 2.0 * ln_gamma_unchecked(alpha)
        - ln_gamma_unchecked(2.0 * alpha + 2.0);
    let g = rgamma(alpha + 2.0);
    nf * t2a * ln_first.exp() + nf * (nf - 1.0) * t2a * g * g
}

/// `Var[𝒩^α(t) | N(t) = n] = n t^{2α} α² / ((2α+1) Γ²(α+2))`.
pub fn cond_var_frac_integral(n: u64, alpha: f64, t: f64) -> f64 {
    let g = rgamma(alpha + 2.0);
    n as f64 * t.powf(2.0 * alpha) * alpha * alpha * g * g / (2.0 * alpha + 1.0)
}

/// `E[N(s) N(w) | N(t) = n] = ns/t + n(n-1)sw/t²` for `0 < s ≤ w < t`.
pub fn cond_mixed_moment_poisson(n: u64, s: f64, w: f64, t: f64) -> Result<f64> {
    ensure!(0.0 < s && s <= w && w < t && t.is_finite(), "need 0 < s <= w < t, got s={s} w={w} t={t}");
    let nf = n as f64;
    Ok(nf * s / t + nf * (nf - 1.0) * s * w / (t * t))
}

/// `Σ_{j=1}^n j^k` exactly. Overflow is reported as an error.
pub fn power_sum(n: u64, k: u32) -> Result<u128> {
    let mut total: u128 = 0;
    for j in 1..=u128::from(n) {
        let term = j.checked_pow(k).ok_or_else(|| Error::Overflow(format!("{j}^{k}")))?;
        total = total.checked_add(term).ok_or_else(|| Error::Overflow(format!("power sum n={n} k={k}")))?;
    }
    Ok(total)
}

/// `E[∫_0^t N^k(s) ds | N(t) = n] = (t/(n+1)) Σ_{j=1}^n j^k`.
pub fn cond_mean_integrated_power(n: u64, k: u32, t: f64) -> Result<f64> {
    ensure!(k >= 1, "k must be positive");
    Ok(t / (n as f64 + 1.0) * power_sum(n, k)? as f64)
}

/// `E ∫_0^t N^k(s) ds` for `k ∈ {1, 2, 3}`.
pub fn mean_integrated_power(lambda: f64, k: u32, t: f64) -> Result<f64> {
    let (l, t2) = (lambda, t * t);
    match k {
        1 => Ok(l * t2 / 2.0),
        2 => Ok(l * l * t2 * t / 3.0 + l * t2 / 2.0),
        3 => Ok(l * l * l * t2 * t2 / 4.0 + l * l * t2 * t + l * t2 / 2.0),
        _ => Err(Error::InvalidParam(format!("closed form available for k in {{1, 2, 3}}, got {k}"))),
    }
}

/// `∫_0^T N^k(s) ds` of a path.
pub fn integrated_power(path: &CountingPath, k: u32) -> f64 {
    let tau = path.jump_times();
    let mut total = 0.0;
    for (j, &start) in tau.iter().enumerate() {
        let end = tau.get(j + 1).copied().unwrap_or(path.horizon());
        total += ((j + 1) as f64).powi(k as i32) * (end - start);
    }
    total
}

/// Quantities `verify_moment` knows how to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentKind {
    MeanCount,
    MeanFracIntegral,
    VarFracIntegral,
    SecondMomentFracIntegral,
    CondMeanFracIntegral { n: u64 },
    CondVarFracIntegral { n: u64 },
    CondSecondMomentFracIntegral { n: u64 },
    MeanIntegratedPower { k: u32 },
    CondMeanIntegratedPower { n: u64, k: u32 },
}

impl MomentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::MeanCount => "mean_count",
            Self::MeanFracIntegral => "mean_frac_integral",
            Self::VarFracIntegral => "var_frac_integral",
            Self::SecondMomentFracIntegral => "second_moment_frac_integral",
            Self::CondMeanFracIntegral { .. } => "cond_mean_frac_integral",
            Self::CondVarFracIntegral { .. } => "cond_var_frac_integral",
            Self::CondSecondMomentFracIntegral { .. } => "cond_second_moment_frac_integral",
            Self::MeanIntegratedPower { .. } => "mean_integrated_power",
            Self::CondMeanIntegratedPower { .. } => "cond_mean_integrated_power",
        }
    }

    fn conditioned_on(&self) -> Option<u64> {
        match *self {
            Self::CondMeanFracIntegral { n }
            | Self::CondVarFracIntegral { n }
            | Self::CondSecondMomentFracIntegral { n } => Some(n),
            Self::CondMeanIntegratedPower { n, .. } => Some(n),
            _ => None,
        }
    }

    fn variance_like(&self) -> bool {
        matches!(self, Self::VarFracIntegral | Self::CondVarFracIntegral { .. })
    }
}

impl fmt::Display for MomentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses a moment name. Conditional kinds take `n` (default 1) and power
/// kinds take `k` (default 1); set them afterwards with [`MomentKind::with_n`]
/// and [`MomentKind::with_k`].
impl FromStr for MomentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mean_count" => Self::MeanCount,
            "mean_frac_integral" | "mean_integral" => Self::MeanFracIntegral,
            "var_frac_integral" | "var_integral" => Self::VarFracIntegral,
            "second_moment_frac_integral" => Self::SecondMomentFracIntegral,
            "cond_mean_frac_integral" | "cond_mean_integral" => Self::CondMeanFracIntegral { n: 1 },
            "cond_var_frac_integral" | "cond_var_integral" => Self::CondVarFracIntegral { n: 1 },
            "cond_second_moment_frac_integral" => Self::CondSecondMomentFracIntegral { n: 1 },
            "mean_integrated_power" => Self::MeanIntegratedPower { k: 1 },
            "cond_mean_integrated_power" => Self::CondMeanIntegratedPower { n: 1, k: 1 },
            other => return Err(Error::InvalidParam(format!("unknown moment {other:?}"))),
        })
    }
}

impl MomentKind {
    pub fn with_n(self, n: u64) -> Self {
        match self {
            Self::CondMeanFracIntegral { .. } => Self::CondMeanFracIntegral { n },
            Self::CondVarFracIntegral { .. } => Self::CondVarFracIntegral { n },
            Self::CondSecondMomentFracIntegral { .. } => Self::CondSecondMomentFracIntegral { n },
            Self::CondMeanIntegratedPower { k, .. } => Self::CondMeanIntegratedPower { n, k },
            other => other,
        }
    }

    pub fn with_k(self, k: u32) -> Self {
        match self {
            Self::MeanIntegratedPower { .. } => Self::MeanIntegratedPower { k },
            Self::CondMeanIntegratedPower { n, .. } => Self::CondMeanIntegratedPower { n, k },
            other => other,
        }
    }

    /// Closed form, if the process parameters admit one.
    pub fn analytic(&self, params: &FppParams, spec: &FracIntegralSpec) -> Result<Option<f64>> {
        let FracIntegralSpec { alpha, t } = *spec;
        let poisson = params.nu == 1.0;
        let lambda = params.lambda;
        Ok(match *self {
            Self::MeanCount => Some(params.mean_count(t)),
            Self::MeanFracIntegral => Some(mean_frac_integral(params, spec)),
            Self::VarFracIntegral => poisson.then(|| var_frac_integral_poisson(lambda, alpha, t)),
            Self::SecondMomentFracIntegral => poisson.then(|| second_moment_frac_integral_poisson(lambda, alpha, t)),
            Self::CondMeanFracIntegral { n } => poisson.then(|| cond_mean_frac_integral(n, alpha, t)),
            Self::CondVarFracIntegral { n } => poisson.then(|| cond_var_frac_integral(n, alpha, t)),
            Self::CondSecondMomentFracIntegral { n } => poisson.then(|| cond_second_moment_frac_integral(n, alpha, t)),
            Self::MeanIntegratedPower { k } => {
                ensure!(k >= 1, "k must be positive");
                if poisson && k <= 3 {
                    Some(mean_integrated_power(lambda, k, t)?)
                } else {
                    None
                }
            }
            Self::CondMeanIntegratedPower { n, k } => {
                if poisson {
                    Some(cond_mean_integrated_power(n, k, t)?)
                } else {
                    None
                }
            }
        })
    }

    fn sample(&self, path: &CountingPath, spec: &FracIntegralSpec) -> f64 {
        match *self {
            Self::MeanCount => path.count() as f64,
            Self::MeanIntegratedPower { k } | Self::CondMeanIntegratedPower { k, .. } => integrated_power(path, k),
            _ => crate::frac_integral::rl_integral_of_path(path, spec).expect("path horizon equals t"),
        }
    }
}

/// Paths tried per accepted sample before a conditional run gives up.
pub const MAX_REJECTIONS: usize = 1_000_000;

/// Monte Carlo check of one moment over `sim.n_paths` samples.
///
/// Conditional kinds draw `sim.n_paths` accepted paths with `N(t) = n`,
/// rejecting the others. The z-score is reported, never thresholded.
pub fn verify_moment(
    kind: MomentKind,
    params: &FppParams,
    spec: &FracIntegralSpec,
    sim: &SimConfig,
) -> Result<MomentReport> {
    params.validate()?;
    spec.validate()?;
    let analytic = kind.analytic(params, spec)?;
    let second = matches!(kind, MomentKind::SecondMomentFracIntegral | MomentKind::CondSecondMomentFracIntegral { .. });
    let acc = run_fold(
        sim,
        Moments::new,
        |m, rng| {
            let path = match kind.conditioned_on() {
                Some(n) => sample_conditioned_path(params, spec.t, n as usize, MAX_REJECTIONS, rng)?,
                None => sample_fpp_path(params, spec.t, rng)?,
            };
            let x = kind.sample(&path, spec);
            m.push(if second { x * x } else { x });
            Ok(())
        },
        |a, b| a.merge(&b),
    )?;
    let (estimate, se) = if kind.variance_like() {
        (acc.variance(), acc.std_error_variance())
    } else {
        (acc.mean(), acc.std_error_mean())
    };
    Ok(MomentReport::new(kind.name(), analytic, estimate, se, acc.count()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-14;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn unconditional_examples() {
        let spec = FracIntegralSpec::new(1.0, 2.0).unwrap();
        assert!(close(mean_frac_integral(&FppParams::poisson(1.0).unwrap(), &spec), 2.0, EPS));
        let half = FracIntegralSpec::new(0.5, 1.0).unwrap();
        assert!(close(mean_frac_integral(&FppParams::new(3.0, 0.5).unwrap(), &half), 3.0, EPS));
        assert!(close(var_frac_integral_poisson(1.0, 0.5, 1.0), std::f64::consts::FRAC_2_PI, EPS));
        assert!(close(var_frac_integral_poisson(2.0, 1.0, 1.5), 2.0 * 1.5f64.powi(3) / 3.0, EPS));
        assert!(close(second_moment_frac_integral_poisson(1.0, 1.0, 1.0), 7.0 / 12.0, EPS));
        assert_eq!(var_frac_integral_poisson(0.0, 0.5, 1.0), 0.0);
    }

    #[test]
    fn conditional_examples() {
        assert!(close(cond_mean_frac_integral(3, 0.5, 1.0), 2.256_758_334_191_025, EPS));
        assert!(close(cond_mean_frac_integral(5, 1.0, 2.0), 5.0, EPS));
        assert_eq!(cond_mean_frac_integral(0, 0.3, 1.0), 0.0);
        assert!(close(cond_second_moment_frac_integral(2, 1.0, 1.0), 7.0 / 6.0, EPS));
        assert!(close(cond_second_moment_frac_integral(1, 1.0, 1.0), 1.0 / 3.0, EPS));
        assert!(close(cond_var_frac_integral(4, 1.0, 1.0), 1.0 / 3.0, EPS));
        assert!(close(cond_mixed_moment_poisson(1, 0.2, 0.6, 1.0).unwrap(), 0.2, EPS));
        assert!(cond_mixed_moment_poisson(2, 0.6, 0.2, 1.0).is_err());
    }

    #[test]
    fn integrated_power_examples() {
        assert!(close(cond_mean_integrated_power(4, 1, 1.0).unwrap(), 2.0, EPS));
        assert!(close(mean_integrated_power(1.0, 2, 1.0).unwrap(), 5.0 / 6.0, EPS));
        assert!(close(mean_integrated_power(1.0, 3, 1.0).unwrap(), 7.0 / 4.0, EPS));
        assert_eq!(mean_integrated_power(0.0, 3, 1.0).unwrap(), 0.0);
        assert!(mean_integrated_power(1.0, 4, 1.0).is_err());
        let p = CountingPath::new(3.0, vec![1.0, 2.0]).unwrap();
        assert_eq!(integrated_power(&p, 1), 3.0);
        assert_eq!(integrated_power(&p, 2), 5.0);
    }

    #[test]
    fn names_round_trip() {
        for kind in [
            MomentKind::MeanCount,
            MomentKind::MeanFracIntegral,
            MomentKind::VarFracIntegral,
            MomentKind::CondVarFracIntegral { n: 1 },
            MomentKind::CondMeanIntegratedPower { n: 1, k: 1 },
        ] {
            assert_eq!(kind.name().parse::<MomentKind>().unwrap(), kind);
        }
        assert_eq!(
            "cond_var_integral".parse::<MomentKind>().unwrap().with_n(4),
            MomentKind::CondVarFracIntegral { n: 4 }
        );
        assert!("nope".parse::<MomentKind>().is_err());
    }

    #[test]
    fn report_z_score() {
        let r = MomentReport::new("x", Some(1.0), 1.3, 0.1, 100);
        assert!((r.z_score.unwrap() - 3.0).abs() < 1e-12);
        assert!(r.within(3.5) && !r.within(2.0));
        let r = MomentReport::new("x", None, 1.3, 0.1, 100);
        assert!(r.z_score.is_none() && r.within(0.0));
    }
}
