//! Modified Bessel function of the first kind, integer order.
//!
//! The series `Σ (z/2)^{2k+ξ} / (k! (k+ξ)!)` is summed outward from its
//! largest term, so no intermediate value overflows and the `e^{-z}` scaled
//! form is available for any `z`.

use super::gamma::ln_gamma_unchecked;
use crate::error::{ensure, Error, Result};

/// `I_ξ(z)` for `z ≥ 0`.
pub fn bessel_i(order: u32, z: f64) -> Result<f64> {
    let (ln_value, sign) = ln_bessel_i(order, z)?;
    if sign == 0.0 {
        return Ok(0.0);
    }
    if ln_value > f64::MAX.ln() {
        return Err(Error::Overflow(format!("I_{order}({z}) exceeds the f64 range")));
    }
    Ok(ln_value.exp())
}

/// `e^{-z} I_ξ(z)` for `z ≥ 0`.
pub fn bessel_i_scaled(order: u32, z: f64) -> Result<f64> {
    let (ln_value, sign) = ln_bessel_i(order, z)?;
    if sign == 0.0 {
        return Ok(0.0);
    }
    Ok((ln_value - z).exp())
}

/// `ln I_ξ(z)`, with a zero flag for `I_ξ(0) = 0` when `ξ ≥ 1`.
pub(crate) fn ln_bessel_i(order: u32, z: f64) -> Result<(f64, f64)> {
    ensure!(z >= 0.0 && z.is_finite(), "bessel_i needs finite z >= 0, got {z}");
    if z == 0.0 {
        return Ok(if order == 0 { (0.0, 1.0) } else { (f64::NEG_INFINITY, 0.0) });
    }
    let xi = f64::from(order);
    let half = 0.5 * z;
    let h2 = half * half;
    // (k+1)(k+ξ+1) = h² at the peak
    let k_peak = ((-(xi + 2.0) + (xi * xi + 4.0 * h2).sqrt()) * 0.5).max(0.0).floor();
    let ln_peak =
        (2.0 * k_peak + xi) * half.ln() - ln_gamma_unchecked(k_peak + 1.0) - ln_gamma_unchecked(k_peak + xi + 1.0);

    let mut sum = 1.0_f64;
    let mut term = 1.0_f64;
    let mut k = k_peak;
    loop {
        term *= h2 / ((k + 1.0) * (k + xi + 1.0));
        sum += term;
        k += 1.0;
        if term < 0.25 * f64::EPSILON * sum {
            break;
        }
    }
    let mut term = 1.0_f64;
    let mut k = k_peak;
    while k > 0.0 {
        term *= k * (k + xi) / h2;
        sum += term;
        k -= 1.0;
        if term < 0.25 * f64::EPSILON * sum {
            break;
        }
    }
    Ok((ln_peak + sum.ln(), 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_zero() {
        assert_eq!(bessel_i(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_i(3, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i_scaled(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn negative_argument_rejected() {
        assert!(matches!(bessel_i(0, -1.0), Err(Error::InvalidParam(_))));
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(bessel_i(0, 800.0), Err(Error::Overflow(_))));
        let s = bessel_i_scaled(0, 800.0).unwrap();
        // leading asymptotic term 1/sqrt(2πz)
        let lead = 1.0 / (2.0 * std::f64::consts::PI * 800.0).sqrt();
        assert!(((s - lead) / lead).abs() < 2e-4);
    }

    #[test]
    fn recurrence() {
        for &z in &[0.5, 1.0, 5.0, 20.0] {
            for xi in 1..=6u32 {
                let lhs = bessel_i(xi - 1, z).unwrap() - bessel_i(xi + 1, z).unwrap();
                let rhs = 2.0 * f64::from(xi) / z * bessel_i(xi, z).unwrap();
                assert!(((lhs - rhs) / rhs).abs() < 1e-10, "z={z} xi={xi}");
            }
        }
    }
}
