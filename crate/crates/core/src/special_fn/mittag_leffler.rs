//! Three-parameter (Prabhakar) Mittag–Leffler function
//!
//! ```text
//! E^γ_{α,β}(z) = Σ_{r≥0} (γ)_r z^r / (r! Γ(αr + β))
//! ```
//!
//! Evaluation strategy, by argument:
//!
//! * `z ≥ 0`: the power series. All terms are positive.
//! * `z < 0`, mild cancellation: the same series with Kahan summation. Its
//!   roundoff is bounded by `ε Σ |t_r| w_r`, where the weight `w_r` covers
//!   the summation itself, the exponent `|ln|t_r||`-sized error of forming
//!   each term and the drift of the Pochhammer recurrence. The series answer
//!   is returned directly when that meets `rel_tol`. Summation is abandoned
//!   once `peak / |sum|` exceeds [`MAX_SERIES_LOSS`].
//! * otherwise, for `α = 1`: Kummer's transformation
//!   `E^γ_{1,β}(z) = e^z Σ (β-γ)_r (-z)^r / (r! Γ(r+β))`, whose terms do not
//!   alternate once `r > γ - β`.
//! * otherwise, for `0 < α < 1`: inversion of the Laplace transform
//!   `s^{αγ-β} / (s^α - z)^γ` along a parabola through the real saddle point
//!   of the Bromwich integrand. The transform has no poles on the principal
//!   sheet, so the contour integral is the whole answer. When the series
//!   also finished, the candidate with the smaller error estimate wins.
//!
//! Terms are formed as `m·2^e / Γ(αr+β)` with the mantissa–exponent pair
//! carrying `(γ)_r z^r / r!` through the Pochhammer ratio `(γ+r)/(r+1)`,
//! so neither factor overflows for large `r`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gamma::{ln_gamma_unchecked, rgamma_unchecked};
use crate::error::{ensure, Error, Result};
use crate::quadrature::{integrate, QuadSpec};

/// Largest tolerated ratio between the peak series term and the running sum
/// (six decimal digits of cancellation).
pub const MAX_SERIES_LOSS: f64 = 1e6;

// ulps of roundoff per term from summation, independent of the term index
const SERIES_ROUNDOFF: f64 = 32.0;

/// Parameters of `E^γ_{α,β}` plus evaluation controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl MLSpec {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma, rel_tol: 1e-12, max_terms: 10_000 }
    }

    /// Two-parameter function `E_{α,β} = E^1_{α,β}`.
    pub fn two(alpha: f64, beta: f64) -> Self {
        Self::new(alpha, beta, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.alpha > 0.0 && self.alpha.is_finite(), "alpha must be positive, got {}", self.alpha);
        ensure!(self.beta > 0.0 && self.beta.is_finite(), "beta must be positive, got {}", self.beta);
        ensure!(self.gamma > 0.0 && self.gamma.is_finite(), "gamma must be positive, got {}", self.gamma);
        ensure!(self.rel_tol > 0.0 && self.rel_tol < 1.0, "rel_tol must lie in (0, 1), got {}", self.rel_tol);
        ensure!(self.max_terms >= 1, "max_terms must be at least 1");
        Ok(())
    }
}

/// Evaluate `E^γ_{α,β}(z)` for real `z`.
pub fn ml3(spec: &MLSpec, z: f64) -> Result<f64> {
    spec.validate()?;
    ensure!(z.is_finite(), "argument must be finite, got {z}");
    let MLSpec { alpha, beta, gamma, .. } = *spec;
    if z == 0.0 {
        return Ok(rgamma_unchecked(beta));
    }
    if z > 0.0 {
        let out = series(alpha, beta, gamma, z, spec, None).map_err(fatal)?;
        return finite(out.sum, z);
    }
    let direct = match series(alpha, beta, gamma, z, spec, Some(MAX_SERIES_LOSS)) {
        Ok(out) => {
            let err = out.roundoff;
            if err <= spec.rel_tol * out.sum.abs() {
                return Ok(out.sum);
            }
            Some((out.sum, err))
        }
        Err(SeriesStop::Cancellation) => None,
        Err(SeriesStop::Fatal(e)) => return Err(e),
    };
    let other = if alpha == 1.0 {
        Some((kummer(beta, gamma, z, spec)?, 0.0))
    } else if alpha < 1.0 {
        Some(parabolic(alpha, beta, gamma, z)?)
    } else {
        None
    };
    let best = match (direct, other) {
        (Some(d), Some(o)) => Some(if o.1 <= d.1 { o } else { d }),
        (d, o) => o.or(d),
    };
    match best {
        Some((value, err)) if err <= 1e-9 * value.abs() + 1e-16 => Ok(value),
        Some((value, err)) => Err(Error::NonConvergence { terms: 0, last_rel: err / value.abs() }),
        // alpha > 1 at strongly negative arguments has no stable route here
        None => Err(Error::NonConvergence { terms: 0, last_rel: f64::INFINITY }),
    }
}

/// `E_{α,β}(z)`.
pub fn ml2(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    ml3(&MLSpec::two(alpha, beta), z)
}

fn finite(v: f64, z: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("Mittag-Leffler series at z = {z}")))
    }
}

struct SeriesOut {
    sum: f64,
    roundoff: f64,
}

enum SeriesStop {
    Cancellation,
    Fatal(Error),
}

fn fatal(stop: SeriesStop) -> Error {
    match stop {
        SeriesStop::Fatal(e) => e,
        SeriesStop::Cancellation => Error::NonConvergence { terms: 0, last_rel: f64::INFINITY },
    }
}

impl From<Error> for SeriesStop {
    fn from(e: Error) -> Self {
        SeriesStop::Fatal(e)
    }
}

/// Direct summation. `gamma` may be any real here (Kummer's transform feeds
/// `β - γ`); a nonpositive integer `gamma` terminates the series exactly.
/// With `abort_peak` set, summation stops as soon as a term exceeds it.
fn series(
    alpha: f64,
    beta: f64,
    gamma: f64,
    z: f64,
    spec: &MLSpec,
    abort_peak: Option<f64>,
) -> std::result::Result<SeriesOut, SeriesStop> {
    let stop = (spec.rel_tol * 1e-2).max(0.25 * f64::EPSILON);
    let negative = z < 0.0;
    let ln_abs_z = z.abs().ln();
    // (gamma)_r z^r / r!  =  mant * 2^exp2
    let mut mant = 1.0_f64;
    let mut exp2 = 0_i32;
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut peak = 0.0_f64;
    let mut weighted = 0.0_f64;
    let mut prev_abs = f64::INFINITY;
    let mut small_run = 0;
    for r in 0..spec.max_terms {
        let rf = r as f64;
        let ln_g = ln_gamma_unchecked(alpha * rf + beta);
        let shifted = f64::from(exp2) * LN_2;
        let term = mant * (shifted - ln_g).exp();
        // Kahan
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        let at = term.abs();
        peak = peak.max(at);
        weighted += at * (SERIES_ROUNDOFF + shifted.abs() + ln_g.abs() + 4.0 * rf);
        if let Some(limit) = abort_peak {
            if peak > limit * sum.abs().max(1.0) || peak.is_nan() || peak >= 1e290 {
                return Err(SeriesStop::Cancellation);
            }
        }
        if !sum.is_finite() {
            return Err(Error::Overflow(format!("Mittag-Leffler series at z = {z}")).into());
        }
        if at <= stop * sum.abs() && at <= prev_abs {
            small_run += 1;
            if small_run >= 2 {
                return Ok(SeriesOut { sum, roundoff: f64::EPSILON * weighted });
            }
        } else {
            small_run = 0;
        }
        prev_abs = at;

        let factor = gamma + rf;
        if factor == 0.0 {
            return Ok(SeriesOut { sum, roundoff: f64::EPSILON * weighted });
        }
        // mant *= (gamma + r)/(r + 1) * |z|, renormalised into [2^-64, 2^64)
        let step = factor / (rf + 1.0);
        mant *= if negative { -step } else { step };
        let scaled = mant.abs().ln() + ln_abs_z;
        let shift = (scaled / LN_2).floor() as i32;
        mant = mant.signum() * (scaled - f64::from(shift) * LN_2).exp();
        exp2 += shift;
    }
    Err(Error::NonConvergence { terms: spec.max_terms, last_rel: prev_abs / sum.abs() }.into())
}

fn kummer(beta: f64, gamma: f64, z: f64, spec: &MLSpec) -> Result<f64> {
    let out = series(1.0, beta, beta - gamma, -z, spec, None).map_err(fatal)?;
    let ln_abs = out.sum.abs().ln() + z;
    Ok(out.sum.signum() * ln_abs.exp())
}

/// Inverse Laplace transform of `F(s) = s^{αγ-β} / (s^α + x)^γ` at `t = 1`
/// along the parabola `s(u) = μ (1 + iu)²`, which encloses the origin and
/// the negative real axis. For `α ≤ 1` every singularity of `F` lies there.
///
/// `μ` is the real saddle point of `φ(s) = s + (αγ-β) ln s - γ ln(s^α + x)`
/// when one exists, so the integrand does not oscillate before it decays.
/// Returns the value and its error estimate.
fn parabolic(alpha: f64, beta: f64, gamma: f64, z: f64) -> Result<(f64, f64)> {
    let x = -z;
    let power = alpha * gamma - beta;
    let phi = |s: Complex64| s + power * s.ln() - gamma * (s.powf(alpha) + x).ln();
    let slope = |s: f64| 1.0 + power / s - gamma * alpha * s.powf(alpha - 1.0) / (s.powf(alpha) + x);
    let mu = saddle(slope).unwrap_or(1.0);
    let shift = phi(Complex64::new(mu, 0.0)).re;
    // f = (2μ/π) Re ∫_0^∞ e^{φ(s(u))} (1 + iu) du
    let integrand = |u: f64| -> f64 {
        let w = Complex64::new(1.0, u);
        let s = mu * w * w;
        ((phi(s) - shift).exp() * w).re
    };
    let upper = (1.0 + 800.0 / mu).sqrt();
    let spec = QuadSpec { rel_tol: 1e-14, abs_tol: 1e-300, max_depth: 50, ..QuadSpec::default() };
    let (value, error) = accept(integrate(integrand, 0.0, upper, &spec))?;
    let scale = 2.0 * mu / PI * shift.exp();
    Ok((value * scale, error * scale))
}

/// Largest positive root of `slope`, found by scanning down a log grid from
/// `1e6` to `1e-4` and bisecting the first sign change.
fn saddle(slope: impl Fn(f64) -> f64) -> Option<f64> {
    let mut hi = 1e6_f64;
    if slope(hi) <= 0.0 {
        return None;
    }
    while hi > 1e-4 {
        let lo = hi / 2.0;
        if slope(lo) < 0.0 {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if slope(m) < 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        hi = lo;
    }
    None
}

// A missed 2e-14 target is still usable; the caller judges the error.
fn accept(r: Result<crate::quadrature::Estimate>) -> Result<(f64, f64)> {
    match r {
        Ok(e) | Err(Error::ToleranceNotMet(e)) => Ok((e.value, e.error)),
        Err(e) => Err(e),
    }
}
