//! Special functions and numerically stable helpers.

use crate::error::Error;
use crate::Result;

/// Euler-Mascheroni constant to 20 digits.
pub const EULER_GAMMA: f64 = 0.57721566490153286061;

/// Stable evaluation of `(1 - exp(-x)) / x`, extended by continuity to
/// `eta(0) = 1`. A truncated Taylor series is used below `|x| < 1e-4` to
/// avoid cancellation; the omitted remainder is below 1e-21 there.
///
/// Mean-reversion terms of the form `(1 - e^{-a(1-b)t}) / (a(1-b))` are
/// written as `t * eta(a(1-b)t)` so that the non-stationary limit `b = 1`
/// needs no separate branch.
pub fn eta(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
    } else {
        -f64::exp_m1(-x) / x
    }
}

/// Exponential integral `Ei(z)` for `z > 0`.
///
/// Power series for `z <= 40`, asymptotic expansion beyond. Relative
/// accuracy is about 1e-13 or better on the positive axis.
pub fn exp_integral_ei(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(format!(
            "exp_integral_ei requires z > 0, got {z}"
        )));
    }
    if z <= 40.0 {
        Ok(ein_series(z) + EULER_GAMMA + z.ln())
    } else {
        // Ei(z) ~ e^z/z * sum_k k!/z^k; terms shrink until k ~ z.
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 1..=30 {
            let next = term * k as f64 / z;
            if next >= term {
                break;
            }
            term = next;
            sum += term;
            if term < 1e-16 * sum {
                break;
            }
        }
        Ok(z.exp() / z * sum)
    }
}

/// Entire part of the exponential integral:
/// `ein(z) = Ei(z) - ln z - gamma = sum_{k>=1} z^k/(k k!)` for `z > 0`.
///
/// All series terms are positive, so there is no cancellation; this is
/// the stable way to evaluate `Ei(z) - ln z - gamma` near zero, where the
/// value itself tends to zero.
pub fn ein(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(format!("ein requires z > 0, got {z}")));
    }
    if z <= 40.0 {
        Ok(ein_series(z))
    } else {
        Ok(exp_integral_ei(z)? - z.ln() - EULER_GAMMA)
    }
}

fn ein_series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut pow = 1.0; // z^k / k!
    for k in 1..=200 {
        pow *= z / k as f64;
        let term = pow / k as f64;
        sum += term;
        if term <= 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Gamma function, delegated to libm's `tgamma` (handles negative
/// non-integer arguments, as needed for tempered-stable cumulants).
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}
