//! Difference `D(t) = N_λ(t) - N_β(t)` of two independent Poisson processes
//! and its time integral.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::path_sim::poisson_count;
use crate::special_fn::ln_bessel_i;

/// Rates of the plus (`lambda`) and minus (`beta`) processes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkellamParams {
    pub lambda: f64,
    pub beta: f64,
}

impl SkellamParams {
    pub fn new(lambda: f64, beta: f64) -> Result<Self> {
        let p = Self { lambda, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.lambda > 0.0 && self.lambda.is_finite(), "lambda must be positive, got {}", self.lambda);
        ensure!(self.beta > 0.0 && self.beta.is_finite(), "beta must be positive, got {}", self.beta);
        Ok(())
    }
}

/// `Pr{D(t) = r} = e^{-(λ+β)t} (λ/β)^{r/2} I_{|r|}(2t√(λβ))`, evaluated in
/// log space.
pub fn skellam_pmf(params: &SkellamParams, t: f64, r: i64) -> Result<f64> {
    params.validate()?;
    ensure!(t > 0.0 && t.is_finite(), "t must be positive, got {t}");
    let SkellamParams { lambda, beta } = *params;
    let order = u32::try_from(r.unsigned_abs()).unwrap_or(u32::MAX);
    let (ln_i, sign) = ln_bessel_i(order, 2.0 * t * (lambda * beta).sqrt())?;
    if sign == 0.0 {
        return Ok(0.0);
    }
    let ln_p = -(lambda + beta) * t + 0.5 * r as f64 * (lambda / beta).ln() + ln_i;
    Ok(ln_p.exp().min(1.0))
}

/// Characteristic function of `∫_0^t D(s) ds`:
/// `exp((λ+β)(sin(μt)/μ - t) + i(λ-β)(1 - cos(μt))/μ)`.
pub fn integral_diff_cf(params: &SkellamParams, t: f64, mu: f64) -> Result<Complex64> {
    params.validate()?;
    ensure!(t > 0.0 && t.is_finite(), "t must be positive, got {t}");
    ensure!(mu.is_finite(), "mu must be finite, got {mu}");
    Ok(integral_diff_cf_unchecked(params.lambda, params.beta, t, mu))
}

/// As [`integral_diff_cf`] for any nonnegative rates; `beta = 0` gives the
/// integrated Poisson process.
pub(crate) fn integral_diff_cf_unchecked(lambda: f64, beta: f64, t: f64, mu: f64) -> Complex64 {
    let x = mu * t;
    // (sin x / x - 1) and (1 - cos x) / x
    let (even, odd) = if x.abs() < 1e-6 {
        let x2 = x * x;
        (-x2 / 6.0 + x2 * x2 / 120.0, x / 2.0 - x * x2 / 24.0)
    } else {
        let h = (0.5 * x).sin();
        (x.sin() / x - 1.0, 2.0 * h * h / x)
    };
    Complex64::new((lambda + beta) * t * even, (lambda - beta) * t * odd).exp()
}

/// `E ∫_0^t D = (λ-β)t²/2`.
pub fn integral_diff_mean(params: &SkellamParams, t: f64) -> f64 {
    0.5 * (params.lambda - params.beta) * t * t
}

/// `Var ∫_0^t D = (λ+β)t³/3`.
pub fn integral_diff_variance(params: &SkellamParams, t: f64) -> f64 {
    (params.lambda + params.beta) * t * t * t / 3.0
}

/// `∫_0^t D(s) ds` as the signed random sum `Σ_{j=1}^{Ñ} Z_j`,
/// `Ñ ~ Poisson((λ+β)t)`, where `Z_j` has density `β/(t(λ+β))` on `(-t, 0]`
/// and `λ/(t(λ+β))` on `(0, t)`.
pub fn sample_integral_diff<R: Rng + ?Sized>(params: &SkellamParams, t: f64, rng: &mut R) -> Result<f64> {
    params.validate()?;
    ensure!(t > 0.0 && t.is_finite(), "t must be positive, got {t}");
    let SkellamParams { lambda, beta } = *params;
    let total = lambda + beta;
    let split = beta / total;
    let n = poisson_count(total * t, rng)?;
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let shifted = u * total - beta;
            if u <= split {
                t * shifted / beta
            } else {
                t * shifted / lambda
            }
        })
        .sum())
}

/// One draw of `D(t)`.
pub fn sample_difference<R: Rng + ?Sized>(params: &SkellamParams, t: f64, rng: &mut R) -> Result<i64> {
    params.validate()?;
    let plus = poisson_count(params.lambda * t, rng)?;
    let minus = poisson_count(params.beta * t, rng)?;
    Ok(plus as i64 - minus as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_reference_value_and_symmetry() {
        let p = SkellamParams::new(1.0, 1.0).unwrap();
        let v = skellam_pmf(&p, 1.0, 0).unwrap();
        assert!((v - 0.308_508_322_553_671_03).abs() < 1e-15);
        for r in 1..=10 {
            let (a, b) = (skellam_pmf(&p, 1.3, r).unwrap(), skellam_pmf(&p, 1.3, -r).unwrap());
            assert!((a - b).abs() <= 1e-15 * a);
        }
    }

    #[test]
    fn pmf_normalises() {
        for &(l, b, t) in &[(1.0, 1.0, 1.0), (5.0, 0.5, 1.0), (2.0, 3.0, 1.5), (0.1, 4.0, 1.2)] {
            let p = SkellamParams::new(l, b).unwrap();
            let s: f64 = (-40..=40).map(|r| skellam_pmf(&p, t, r).unwrap()).sum();
            assert!((s - 1.0).abs() < 1e-10, "{l} {b} {t}: {s}");
        }
    }

    #[test]
    fn cf_limits() {
        let p = SkellamParams::new(2.0, 1.0).unwrap();
        assert_eq!(integral_diff_cf(&p, 1.0, 0.0).unwrap(), Complex64::new(1.0, 0.0));
        // both sides of the Taylor switch agree with the leading behaviour
        for mu in [0.999e-6, 1.001e-6] {
            let x = mu;
            let want = Complex64::new(-3.0 * x * x / 6.0, 0.5 * x - x * x * x / 24.0).exp();
            assert!((integral_diff_cf(&p, 1.0, mu).unwrap() - want).norm() < 1e-15);
        }
        // derivative at zero is i E[X]
        let h = 1e-4;
        let d = (integral_diff_cf(&p, 1.0, h).unwrap() - integral_diff_cf(&p, 1.0, -h).unwrap()) / (2.0 * h);
        assert!((d - Complex64::new(0.0, 0.5)).norm() < 1e-7);
    }

    #[test]
    fn cf_with_zero_minus_rate_is_compound_form() {
        let (lambda, t, mu) = (1.5, 2.0, 0.7);
        let i = Complex64::i();
        let want = (-lambda * t + lambda / (i * mu) * ((i * mu * t).exp() - 1.0)).exp();
        assert!((integral_diff_cf_unchecked(lambda, 0.0, t, mu) - want).norm() < 1e-14);
    }

    #[test]
    fn rejects_bad_rates() {
        assert!(SkellamParams::new(0.0, 1.0).is_err());
        let p = SkellamParams { lambda: 1.0, beta: -1.0 };
        assert!(skellam_pmf(&p, 1.0, 0).is_err());
    }
}
