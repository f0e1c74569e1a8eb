//! Subordinator models driving the spike factor.
//!
//! Three Lévy measures are supported: a point mass (jumps of one fixed
//! size), a compound Poisson process with exponential jumps, and the
//! tempered stable family. Each exposes its density, closed-form
//! cumulant function with derivatives up to order three, and the
//! admissible parameter domains for the measure change.

use crate::error::Error;
use crate::special::gamma;
use crate::Result;

/// Specification of the driving subordinator `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevyModel {
    /// All jumps have size `a`; the Lévy measure is a unit point mass at
    /// `a`, so jumps arrive at rate one per day.
    Dirac { a: f64 },
    /// Compound Poisson with density `c e^{-lambda z}`: intensity
    /// `c/lambda`, exponential jump sizes with mean `1/lambda`.
    CompoundPoissonExp { c: f64, lambda: f64 },
    /// Tempered stable with density `c z^{-(1+alpha)} e^{-lambda z}` for
    /// `alpha` in `[0, 1)`. Infinite activity for every `alpha`.
    TemperedStable { c: f64, lambda: f64, alpha: f64 },
}

/// Admissible parameter intervals for the measure-change tilt.
///
/// All intervals are open and unbounded below; only the suprema are
/// stored. `theta_max` is the exponential-moment boundary of `L` and may
/// be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaDomains {
    /// Supremum of exponential moments, possibly infinite.
    pub theta_max: f64,
    /// Supremum of the base domain `D_L = (-inf, theta_max / 2)`.
    pub d_l_sup: f64,
    /// Supremum of the geometric-model domain
    /// `D_L^g = (-inf, (theta_max - 1) min (theta_max / 2))`.
    pub d_l_g_sup: f64,
}

impl ThetaDomains {
    /// Supremum of the shrunken geometric domain `D_L^g(delta)`.
    pub fn d_l_g_delta_sup(&self, delta: f64) -> f64 {
        (self.theta_max - 1.0 - delta).min(self.theta_max / 2.0)
    }

    pub fn contains_d_l(&self, theta: f64) -> bool {
        theta < self.d_l_sup
    }

    pub fn contains_d_l_g(&self, theta: f64) -> bool {
        theta < self.d_l_g_sup
    }

    pub fn contains_d_l_g_delta(&self, theta: f64, delta: f64) -> bool {
        theta < self.d_l_g_delta_sup(delta)
    }
}

/// Result of a density query: tempered-stable and compound Poisson
/// measures have a Lebesgue density, the point-mass model does not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevyDensity {
    Density(f64),
    PointMass { location: f64, weight: f64 },
}

impl LevyModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            LevyModel::Dirac { a } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::domain(format!("dirac jump size must be > 0, got {a}")));
                }
            }
            LevyModel::CompoundPoissonExp { c, lambda } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::domain(format!("cpexp scale c must be > 0, got {c}")));
                }
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::domain(format!(
                        "cpexp rate lambda must be > 0, got {lambda}"
                    )));
                }
            }
            LevyModel::TemperedStable { c, lambda, alpha } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::domain(format!(
                        "tempered_stable scale c must be > 0, got {c}"
                    )));
                }
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::domain(format!(
                        "tempered_stable rate lambda must be > 0, got {lambda}"
                    )));
                }
                if !(0.0..1.0).contains(&alpha) {
                    return Err(Error::domain(format!(
                        "tempered_stable index alpha must lie in [0, 1), got {alpha}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Exponential-moment boundary: infinite for the point mass, the
    /// tempering rate otherwise.
    pub fn theta_max(&self) -> f64 {
        match *self {
            LevyModel::Dirac { .. } => f64::INFINITY,
            LevyModel::CompoundPoissonExp { lambda, .. } => lambda,
            LevyModel::TemperedStable { lambda, .. } => lambda,
        }
    }

    pub fn domains(&self) -> ThetaDomains {
        let theta_max = self.theta_max();
        ThetaDomains {
            theta_max,
            d_l_sup: theta_max / 2.0,
            d_l_g_sup: (theta_max - 1.0).min(theta_max / 2.0),
        }
    }

    /// Total mass of the Lévy measure (the jump intensity for
    /// finite-activity models; infinite for tempered stable).
    pub fn total_mass(&self) -> f64 {
        match *self {
            LevyModel::Dirac { .. } => 1.0,
            LevyModel::CompoundPoissonExp { c, lambda } => c / lambda,
            LevyModel::TemperedStable { .. } => f64::INFINITY,
        }
    }

    /// Whether the Lévy measure is finite. Tempered stable has infinite
    /// activity for every `alpha` in `[0, 1)`: the mass diverges at the
    /// origin already for `alpha = 0`.
    pub fn has_finite_activity(&self) -> bool {
        matches!(
            self,
            LevyModel::Dirac { .. } | LevyModel::CompoundPoissonExp { .. }
        )
    }

    /// Lévy density at `z > 0`, or the point-mass descriptor.
    pub fn levy_density(&self, z: f64) -> Result<LevyDensity> {
        if !(z > 0.0) {
            return Err(Error::domain(format!(
                "levy_density requires z > 0, got {z}"
            )));
        }
        Ok(match *self {
            LevyModel::Dirac { a } => LevyDensity::PointMass {
                location: a,
                weight: 1.0,
            },
            LevyModel::CompoundPoissonExp { c, lambda } => {
                LevyDensity::Density(c * (-lambda * z).exp())
            }
            LevyModel::TemperedStable { c, lambda, alpha } => {
                LevyDensity::Density(c * z.powf(-(1.0 + alpha)) * (-lambda * z).exp())
            }
        })
    }

    fn check_theta(&self, theta: f64, what: &str) -> Result<()> {
        if !theta.is_finite() {
            return Err(Error::domain(format!("{what} must be finite, got {theta}")));
        }
        if theta >= self.theta_max() {
            return Err(Error::domain(format!(
                "{what} = {theta} at or beyond the exponential-moment boundary theta_max = {}",
                self.theta_max()
            )));
        }
        Ok(())
    }

    /// Cumulant function and its derivatives, in closed form.
    ///
    /// `order = 0` returns `kappa_L(theta)`, `order = n` returns
    /// `kappa_L^(n)(theta) = int z^n e^{theta z} l(dz)` for `n = 1..3`.
    pub fn cumulant(&self, theta: f64, order: u8) -> Result<f64> {
        self.check_theta(theta, "theta")?;
        if order > 3 {
            return Err(Error::domain(format!(
                "cumulant order must lie in 0..=3, got {order}"
            )));
        }
        let n = order as i32;
        Ok(match *self {
            LevyModel::Dirac { a } => {
                if order == 0 {
                    f64::exp_m1(a * theta)
                } else {
                    a.powi(n) * (a * theta).exp()
                }
            }
            LevyModel::CompoundPoissonExp { c, lambda } => {
                let b = lambda - theta;
                if order == 0 {
                    c * theta / (lambda * b)
                } else {
                    c * factorial(n) / b.powi(n + 1)
                }
            }
            LevyModel::TemperedStable { c, lambda, alpha } => {
                let b = lambda - theta;
                if alpha == 0.0 {
                    // Gamma subordinator: kappa = c log(lambda / (lambda - theta)).
                    if order == 0 {
                        -c * f64::ln_1p(-theta / lambda)
                    } else {
                        c * factorial(n - 1) / b.powi(n)
                    }
                } else if order == 0 {
                    c * gamma(-alpha) * (b.powf(alpha) - lambda.powf(alpha))
                } else {
                    c * gamma(n as f64 - alpha) * b.powf(alpha - n as f64)
                }
            }
        })
    }

    /// Cancellation-free evaluation of
    /// `kappa_L^(order)(theta + u) - kappa_L^(order)(theta)`.
    ///
    /// The Riccati vector fields contract these differences against tiny
    /// `u`; forming them from two separate cumulant calls would lose all
    /// relative accuracy once `u` drops below the rounding floor of
    /// `kappa`. Each arm below is exact in `u` via `expm1`/`ln1p` or an
    /// explicit factorization.
    pub fn cumulant_diff(&self, theta: f64, u: f64, order: u8) -> Result<f64> {
        self.check_theta(theta, "theta")?;
        self.check_theta(theta + u, "theta + u")?;
        if order > 3 {
            return Err(Error::domain(format!(
                "cumulant order must lie in 0..=3, got {order}"
            )));
        }
        let n = order as i32;
        Ok(match *self {
            LevyModel::Dirac { a } => {
                let base = if order == 0 { 1.0 } else { a.powi(n) };
                base * (a * theta).exp() * f64::exp_m1(a * u)
            }
            LevyModel::CompoundPoissonExp { c, lambda } => {
                let b = lambda - theta;
                if order == 0 {
                    // c(theta+u)/(lam(b-u)) - c theta/(lam b) = c u / ((b-u) b).
                    c * u / ((b - u) * b)
                } else {
                    let k = c * factorial(n) / b.powi(n + 1);
                    k * f64::exp_m1(-(n as f64 + 1.0) * f64::ln_1p(-u / b))
                }
            }
            LevyModel::TemperedStable { c, lambda, alpha } => {
                let b = lambda - theta;
                if alpha == 0.0 {
                    if order == 0 {
                        -c * f64::ln_1p(-u / b)
                    } else {
                        let k = c * factorial(n - 1) / b.powi(n);
                        k * f64::exp_m1(-(n as f64) * f64::ln_1p(-u / b))
                    }
                } else if order == 0 {
                    c * gamma(-alpha) * b.powf(alpha) * f64::exp_m1(alpha * f64::ln_1p(-u / b))
                } else {
                    let k = c * gamma(n as f64 - alpha) * b.powf(alpha - n as f64);
                    k * f64::exp_m1((alpha - n as f64) * f64::ln_1p(-u / b))
                }
            }
        })
    }
}

fn factorial(n: i32) -> f64 {
    match n {
        0 => 1.0,
        1 => 1.0,
        2 => 2.0,
        3 => 6.0,
        _ => (1..=n).map(|k| k as f64).product(),
    }
}
