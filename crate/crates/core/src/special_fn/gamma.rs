//! Log-gamma by the Lanczos approximation (g = 7, nine coefficients).
//! Γ and 1/Γ below 171 use the recurrence into [1, 2], where a Taylor
//! series of the entire function 1/Γ is accurate to a couple of ulps.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use crate::error::{ensure, Result};

const LANCZOS_G: f64 = 7.0;

#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// ln(sqrt(2 pi))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural log of Γ(x) for x > 0.
pub fn log_gamma(x: f64) -> Result<f64> {
    ensure!(x > 0.0 && x.is_finite(), "log_gamma needs a finite x > 0, got {x}");
    Ok(ln_gamma_unchecked(x))
}

/// Γ(x) for x > 0. Overflows to `+inf` above x ≈ 171.6.
pub fn gamma(x: f64) -> Result<f64> {
    ensure!(x > 0.0 && x.is_finite(), "gamma needs a finite x > 0, got {x}");
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    // exact factorials for small integers
    if x == x.floor() && x <= 21.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    if x > RECURRENCE_LIMIT {
        return ln_gamma_unchecked(x).exp();
    }
    if x < 1.0 {
        return 1.0 / (x * rgamma_unit(x + 1.0));
    }
    let (y, product) = shift_down(x);
    product / rgamma_unit(y)
}

/// 1/Γ(x) for x > 0; underflows gracefully to 0.
pub(crate) fn rgamma_unchecked(x: f64) -> f64 {
    if x > RECURRENCE_LIMIT {
        return (-ln_gamma_unchecked(x)).exp();
    }
    if x < 1.0 {
        return x * rgamma_unit(x + 1.0);
    }
    let (y, product) = shift_down(x);
    rgamma_unit(y) / product
}

/// Above this, Γ comes from `exp(ln Γ)` rather than the recurrence.
const RECURRENCE_LIMIT: f64 = 171.0;

/// Writes Γ(x) = product · Γ(y) with y in [1, 2].
fn shift_down(x: f64) -> (f64, f64) {
    let (mut y, mut product) = (x, 1.0);
    while y > 2.0 {
        y -= 1.0;
        product *= y;
    }
    (y, product)
}

/// Taylor coefficients of 1/Γ about 1.5.
const RGAMMA_TAYLOR: [f64; 23] = [
    FRAC_2_SQRT_PI,
    -0.0411745264452831,
    -0.5266544355255445,
    0.17510202604393457,
    0.050966860247706074,
    -0.042155169368535604,
    0.006612897826824127,
    0.002120731442572938,
    -0.0011107302545948906,
    0.00015235762076747688,
    2.5355204923814165e-05,
    -1.3896805717913756e-05,
    2.1562032905141724e-06,
    5.7942640540526726e-08,
    -8.913551118311116e-08,
    1.7103469415915374e-08,
    -9.313686445241901e-10,
    -2.6804741033496623e-10,
    7.458932233316326e-11,
    -8.012807061414718e-12,
    -8.382343033451855e-14,
    1.6946340904320522e-13,
    -2.7875756707125753e-14,
];

/// 1/Γ(x) for x in [1, 2], good to a couple of ulps.
fn rgamma_unit(x: f64) -> f64 {
    let h = x - 1.5;
    RGAMMA_TAYLOR.iter().rev().fold(0.0, |acc, &c| acc * h + c)
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let x = x - 1.0;
    let mut a = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + a.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!((log_gamma(0.5).unwrap() - 0.572_364_942_924_700_1).abs() < 1e-14);
        let v = log_gamma(11.0).unwrap();
        assert!(((v - 15.104_412_573_075_516) / v).abs() < 1e-14);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn recurrence_and_factorials() {
        let mut f = 1.0_f64;
        for n in 1..=30u32 {
            let lg = log_gamma(f64::from(n) + 1.0).unwrap();
            f *= f64::from(n);
            assert!((lg - f.ln()).abs() < 1e-14 * f.ln().max(1.0), "n={n}");
        }
        for &x in &[0.01, 0.3, 0.7, 1.3, 2.5, 7.25, 40.5] {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = log_gamma(x).unwrap() + f64::ln(x);
            assert!((lhs - rhs).abs() < 2e-14 * (1.0 + lhs.abs()), "x={x}");
        }
    }

    #[test]
    fn gamma_half_integers() {
        let sqrt_pi = PI.sqrt();
        assert!((gamma(0.5).unwrap() - sqrt_pi).abs() < 1e-15);
        assert!((gamma(1.5).unwrap() - sqrt_pi / 2.0).abs() < 1e-15);
        assert!((gamma(2.5).unwrap() / (0.75 * sqrt_pi) - 1.0).abs() < 1e-15);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
    }
}
