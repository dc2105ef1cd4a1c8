//! Analytic distributions of the fractional Poisson process `N^ν(t)`.
//!
//! `N^ν` is the renewal process whose interarrival times have density
//! `λ s^{ν-1} E_{ν,ν}(-λ s^ν)`. At `ν = 1` every function here reduces to its
//! classical Poisson counterpart.

use std::cell::{Cell, RefCell};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::quadrature::{integrate_nodes, Estimate, Node, QuadSpec};
use crate::special_fn::{ln_gamma_unchecked, ml3, MLSpec};

/// Rate `λ` and fractional order `ν ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FppParams {
    pub lambda: f64,
    pub nu: f64,
}

impl FppParams {
    pub fn new(lambda: f64, nu: f64) -> Result<Self> {
        let p = Self { lambda, nu };
        p.validate()?;
        Ok(p)
    }

    /// Classical homogeneous Poisson process (`ν = 1`).
    pub fn poisson(lambda: f64) -> Result<Self> {
        Self::new(lambda, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.lambda > 0.0 && self.lambda.is_finite(), "lambda must be positive, got {}", self.lambda);
        ensure!(self.nu > 0.0 && self.nu <= 1.0, "nu must lie in (0, 1], got {}", self.nu);
        Ok(())
    }

    /// `E N^ν(t) = λ t^ν / Γ(ν + 1)`.
    pub fn mean_count(&self, t: f64) -> f64 {
        self.lambda * t.powf(self.nu) * (-ln_gamma_unchecked(self.nu + 1.0)).exp()
    }
}

/// One cell `Pr{N^ν(s) = k, N^ν(t) = r}` of the bivariate law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateQuery {
    pub s: f64,
    pub t: f64,
    pub k: u32,
    pub r: u32,
    pub quad: QuadSpec,
}

impl BivariateQuery {
    pub fn new(s: f64, t: f64, k: u32, r: u32) -> Self {
        Self { s, t, k, r, quad: QuadSpec::default() }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.s > 0.0 && self.s <= self.t && self.t.is_finite(),
            "need 0 < s <= t, got s={} t={}",
            self.s,
            self.t
        );
        ensure!(self.k <= self.r, "need k <= r, got k={} r={}", self.k, self.r);
        self.quad.validate()
    }
}

fn ml(alpha: f64, beta: f64, gamma: f64, z: f64) -> Result<f64> {
    ml3(&MLSpec::new(alpha, beta, gamma), z)
}

/// `p_k^ν(t) = Pr{N^ν(t) = k} = (λt^ν)^k E^{k+1}_{ν,νk+1}(-λt^ν)`.
pub fn pmf(params: &FppParams, t: f64, k: u32) -> Result<f64> {
    params.validate()?;
    ensure!(t >= 0.0 && t.is_finite(), "t must be a finite nonnegative time, got {t}");
    if t == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let nu = params.nu;
    let kf = f64::from(k);
    let z = params.lambda * t.powf(nu);
    let e = ml(nu, nu * kf + 1.0, kf + 1.0, -z)?;
    Ok(((kf * z.ln()).exp() * e).clamp(0.0, 1.0))
}

/// `Pr{T_1 > s} = E_{ν,1}(-λ s^ν)`, the interarrival survival function.
pub fn survival(params: &FppParams, s: f64) -> Result<f64> {
    params.validate()?;
    ensure!(s >= 0.0 && s.is_finite(), "s must be a finite nonnegative time, got {s}");
    if s == 0.0 {
        return Ok(1.0);
    }
    Ok(ml(params.nu, 1.0, 1.0, -params.lambda * s.powf(params.nu))?.clamp(0.0, 1.0))
}

/// Interarrival density `λ s^{ν-1} E_{ν,ν}(-λ s^ν)`.
pub fn interarrival_density(params: &FppParams, s: f64) -> Result<f64> {
    params.validate()?;
    ensure!(s > 0.0 && s.is_finite(), "s must be positive, got {s}");
    let nu = params.nu;
    let e = ml(nu, nu, 1.0, -params.lambda * s.powf(nu))?;
    Ok((params.lambda * s.powf(nu - 1.0) * e).max(0.0))
}

/// Density of the `k`-th event epoch, `λ^k s^{νk-1} E^k_{ν,νk}(-λ s^ν)`.
pub fn waiting_time_density(params: &FppParams, k: u32, s: f64) -> Result<f64> {
    params.validate()?;
    ensure!(k >= 1, "waiting time needs k >= 1");
    ensure!(s > 0.0 && s.is_finite(), "s must be positive, got {s}");
    let nu = params.nu;
    let kf = f64::from(k);
    let e = ml(nu, nu * kf, kf, -params.lambda * s.powf(nu))?;
    let scale = (kf * params.lambda.ln() + (nu * kf - 1.0) * s.ln()).exp();
    Ok((scale * e).max(0.0))
}

/// `Pr{N(s) = r | N(t) = n}` for the Poisson process: Binomial(n, s/t).
pub fn conditional_binomial(n: u32, s: f64, t: f64, r: u32) -> Result<f64> {
    ensure!(0.0 <= s && s < t && t.is_finite(), "need 0 <= s < t, got s={s} t={t}");
    ensure!(r <= n, "need r <= n, got r={r} n={n}");
    let p = s / t;
    Ok(ln_choose(n, r).exp() * p.powi(r as i32) * (1.0 - p).powi((n - r) as i32))
}

/// `Pr{N(s) = h, N(w) = k | N(t) = n}` for the Poisson process, `s < w < t`.
pub fn conditional_trinomial(n: u32, s: f64, w: f64, t: f64, h: u32, k: u32) -> Result<f64> {
    ensure!(0.0 < s && s < w && w < t && t.is_finite(), "need 0 < s < w < t, got s={s} w={w} t={t}");
    ensure!(h <= k && k <= n, "need h <= k <= n, got h={h} k={k} n={n}");
    let ln_coef = ln_fact(n) - ln_fact(h) - ln_fact(k - h) - ln_fact(n - k);
    let p1 = s / t;
    let p2 = (w - s) / t;
    let p3 = (t - w) / t;
    Ok(ln_coef.exp() * p1.powi(h as i32) * p2.powi((k - h) as i32) * p3.powi((n - k) as i32))
}

fn ln_fact(n: u32) -> f64 {
    ln_gamma_unchecked(f64::from(n) + 1.0)
}

fn ln_choose(n: u32, r: u32) -> f64 {
    ln_fact(n) - ln_fact(r) - ln_fact(n - r)
}

/// `Pr{N^ν(s) = k, N^ν(t) = r}` by iterated adaptive quadrature.
///
/// For `0 < k < r` the renewal decomposition gives
///
/// ```text
/// λ^r ∫_0^s w^{νk-1} E^k_{ν,νk}(-λw^ν)
///       ∫_{s-w}^{t-w} y^{ν-1} E_{ν,ν}(-λy^ν) g_{r-k}(t-w-y) dy dw,
/// g_m(x) = x^{ν(m-1)} E^m_{ν,ν(m-1)+1}(-λx^ν).
/// ```
///
/// Boundary cells: `k = 0` puts the first epoch at `w = 0` and drops the outer
/// integral; `r = k` keeps only the waiting-time density against the
/// survival of the next interarrival; `r = k + 1` is the general formula with
/// `g_1 = E_{ν,1}`. The inner integral is taken in `v = y^ν`, which absorbs
/// the `y^{ν-1}` factor exactly.
pub fn bivariate_pmf(params: &FppParams, q: &BivariateQuery) -> Result<Estimate> {
    params.validate()?;
    q.validate()?;
    let BivariateQuery { s, t, k, r, quad } = *q;
    if s == t {
        let v = if k == r { pmf(params, t, r)? } else { 0.0 };
        return Ok(Estimate::new(v, 0.0));
    }
    let nu = params.nu;
    let lambda = params.lambda;
    let kf = f64::from(k);

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_short = Cell::new(false);
    let eval = |v: Result<f64>| -> f64 {
        match v {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            }
        }
    };

    let outer_spec = {
        let mut sp = quad.regular();
        if k >= 1 && nu * kf < 1.0 {
            sp = sp.left_singular(nu * kf);
        }
        if nu < 1.0 {
            // the inner integral behaves like c - d (s-w)^ν as w -> s
            sp = sp.right_singular(nu);
        }
        sp
    };
    let inner_spec = QuadSpec { rel_tol: quad.rel_tol / 10.0, abs_tol: quad.abs_tol / 10.0, ..quad.regular() };

    let result = if k == 0 && r == 0 {
        Ok(Estimate::new(survival(params, t)?, 0.0))
    } else if r == k {
        // T_k <= s and the next gap outlasts t - T_k
        let density_ml = MLSpec::new(nu, nu * kf, kf);
        let ln_lk = kf * lambda.ln();
        integrate_nodes(
            |n: Node| {
                let w = n.from_a;
                let dens = (ln_lk + (nu * kf - 1.0) * w.ln()).exp() * eval(ml3(&density_ml, -lambda * w.powf(nu)));
                let gap = (t - s) + n.from_b;
                dens * eval(ml(nu, 1.0, 1.0, -lambda * gap.powf(nu)))
            },
            0.0,
            s,
            &outer_spec,
        )
    } else {
        let m = r - k;
        let inner = |w: f64, to_s: f64| -> f64 {
            // v = y^ν over y in (s - w, t - w)
            let span = t - w;
            let lo = to_s.powf(nu);
            let hi = ((t - s) + to_s).powf(nu);
            if hi <= lo {
                return 0.0;
            }
            let est = integrate_nodes(
                |n: Node| {
                    let v = n.x;
                    let y = v.powf(1.0 / nu);
                    let rest = (span - y).max(0.0);
                    eval(ml(nu, nu, 1.0, -lambda * v)) * g_factor(nu, lambda, m, rest, &eval) / nu
                },
                lo,
                hi,
                &inner_spec,
            );
            match est {
                Ok(e) => e.value,
                Err(Error::ToleranceNotMet(e)) => {
                    inner_short.set(true);
                    e.value
                }
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        };
        if k == 0 {
            Ok(Estimate::new(inner(0.0, s), 0.0))
        } else {
            let density_ml = MLSpec::new(nu, nu * kf, kf);
            integrate_nodes(
                |n: Node| {
                    let w = n.from_a;
                    let dens = ((nu * kf - 1.0) * w.ln()).exp() * eval(ml3(&density_ml, -lambda * w.powf(nu)));
                    dens * inner(w, n.from_b)
                },
                0.0,
                s,
                &outer_spec,
            )
        }
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    // remaining λ factors: λ^k already applied in the r = k branch
    let scale = if r == k { 1.0 } else { (f64::from(r) * lambda.ln()).exp() };
    let scaled = |e: Estimate| Estimate::new((e.value * scale).clamp(0.0, 1.0), e.error * scale);
    match result {
        Ok(e) if !inner_short.get() => Ok(scaled(e)),
        Ok(e) | Err(Error::ToleranceNotMet(e)) => Err(Error::ToleranceNotMet(scaled(e))),
        Err(e) => Err(e),
    }
}

/// `g_m(x) = x^{ν(m-1)} E^m_{ν,ν(m-1)+1}(-λ x^ν)`, the density of `m - 1` more
/// events followed by survival, after the convolution identity.
fn g_factor(nu: f64, lambda: f64, m: u32, x: f64, eval: &impl Fn(Result<f64>) -> f64) -> f64 {
    let mf = f64::from(m);
    let e = eval(ml(nu, nu * (mf - 1.0) + 1.0, mf, -lambda * x.powf(nu)));
    if m == 1 {
        e
    } else {
        x.powf(nu * (mf - 1.0)) * e
    }
}

/// `Pr{N^ν(t) ≥ k} = 1 - Σ_{j<k} p_j^ν(t)`.
pub fn tail_probability(params: &FppParams, t: f64, k: u32) -> Result<f64> {
    let mut below = 0.0;
    for j in 0..k {
        below += pmf(params, t, j)?;
    }
    Ok((1.0 - below).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson(lambda: f64) -> FppParams {
        FppParams::poisson(lambda).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn pmf_poisson_reduction() {
        assert!(close(pmf(&poisson(1.0), 1.0, 0).unwrap(), 0.367_879_441_171_442_33, 1e-14));
        assert!(close(pmf(&poisson(2.0), 3.0, 4).unwrap(), 0.133_852_617_539_983_32, 1e-13));
    }

    #[test]
    fn pmf_at_time_zero_is_point_mass() {
        let p = FppParams::new(1.0, 0.5).unwrap();
        assert_eq!(pmf(&p, 0.0, 0).unwrap(), 1.0);
        assert_eq!(pmf(&p, 0.0, 3).unwrap(), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(FppParams::new(0.0, 0.5).is_err());
        assert!(FppParams::new(1.0, 0.0).is_err());
        assert!(FppParams::new(1.0, 1.2).is_err());
        assert!(pmf(&poisson(1.0), -1.0, 0).is_err());
        assert!(interarrival_density(&poisson(1.0), 0.0).is_err());
        assert!(waiting_time_density(&poisson(1.0), 0, 1.0).is_err());
    }

    #[test]
    fn densities_reduce_to_exponential_and_erlang() {
        assert!(close(interarrival_density(&poisson(3.0), 0.2).unwrap(), 1.646_434_908_282_079_3, 1e-14));
        assert!(close(waiting_time_density(&poisson(1.0), 2, 1.0).unwrap(), 0.367_879_441_171_442_33, 1e-14));
        assert!(close(waiting_time_density(&poisson(2.0), 3, 0.5).unwrap(), 0.367_879_441_171_442_33, 1e-14));
    }

    #[test]
    fn binomial_and_trinomial() {
        assert_eq!(conditional_binomial(0, 0.3, 1.0, 0).unwrap(), 1.0);
        assert!(close(conditional_binomial(2, 0.5, 1.0, 1).unwrap(), 0.5, 1e-15));
        assert!(close(conditional_binomial(5, 0.3, 1.0, 2).unwrap(), 0.3087, 1e-14));
        assert!(conditional_binomial(2, 1.0, 1.0, 1).is_err());
        assert!(conditional_binomial(2, 0.5, 1.0, 3).is_err());

        assert!(close(conditional_trinomial(0, 0.2, 0.5, 1.0, 0, 0).unwrap(), 1.0, 1e-15));
        assert!(close(conditional_trinomial(1, 1.0, 2.0, 4.0, 0, 1).unwrap(), 0.25, 1e-15));
        let mut total = 0.0;
        for k in 0..=6 {
            for h in 0..=k {
                total += conditional_trinomial(6, 0.2, 0.5, 1.0, h, k).unwrap();
            }
        }
        assert!(close(total, 1.0, 1e-14));
        assert!(conditional_trinomial(3, 0.5, 0.5, 1.0, 0, 1).is_err());
        assert!(conditional_trinomial(3, 0.2, 0.5, 1.0, 2, 1).is_err());
    }

    #[test]
    fn bivariate_poisson_values() {
        let e = bivariate_pmf(&poisson(1.0), &BivariateQuery::new(1.0, 2.0, 1, 2)).unwrap();
        assert!(close(e.value, 0.135_335_283_236_612_7, 1e-7), "{e:?}");
        let e = bivariate_pmf(&poisson(2.0), &BivariateQuery::new(0.5, 1.0, 2, 3)).unwrap();
        assert!(close(e.value, 0.067_667_641_618_306_3, 1e-7), "{e:?}");
    }

    #[test]
    fn bivariate_equal_times_collapses() {
        let p = FppParams::new(1.0, 0.5).unwrap();
        let e = bivariate_pmf(&p, &BivariateQuery::new(1.0, 1.0, 2, 2)).unwrap();
        assert!(close(e.value, pmf(&p, 1.0, 2).unwrap(), 1e-15));
        let e = bivariate_pmf(&p, &BivariateQuery::new(1.0, 1.0, 1, 2)).unwrap();
        assert_eq!(e.value, 0.0);
    }

    #[test]
    fn bivariate_rejects_bad_queries() {
        let p = poisson(1.0);
        assert!(bivariate_pmf(&p, &BivariateQuery::new(2.0, 1.0, 0, 0)).is_err());
        assert!(bivariate_pmf(&p, &BivariateQuery::new(0.5, 1.0, 3, 2)).is_err());
        assert!(bivariate_pmf(&p, &BivariateQuery::new(0.0, 1.0, 0, 0)).is_err());
    }
}
