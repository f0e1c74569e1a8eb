//! Measure-change parameters, Girsanov kernels and the transformed
//! factor dynamics.
//!
//! The pricing measure is parametrized by a level tilt `(theta1, theta2)`
//! and a speed damping `(beta1, beta2)` in `[0, 1]^2`. Under it both
//! factors stay Langevin equations: the mean-reversion level drifts move
//! to `mu_X + theta1` and `mu_Y + kappa'(theta2)`, the speeds shrink to
//! `alpha (1 - beta)`. At `beta = 1` the corresponding factor degenerates
//! to a non-stationary (drifted) dynamics.

use crate::error::Error;
use crate::levy::LevyModel;
use crate::Result;

/// Deterministic seasonality component of the spot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Seasonality {
    Constant { level: f64 },
    /// `level + amplitude * sin(2 pi t / period_days + phase)`.
    Trig {
        level: f64,
        amplitude: f64,
        period_days: f64,
        phase: f64,
    },
}

impl Seasonality {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Seasonality::Constant { level } => level,
            Seasonality::Trig {
                level,
                amplitude,
                period_days,
                phase,
            } => level + amplitude * (2.0 * std::f64::consts::PI * t / period_days + phase).sin(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Seasonality::Constant { level } => {
                if !level.is_finite() {
                    return Err(Error::domain("seasonality level must be finite"));
                }
            }
            Seasonality::Trig {
                level,
                amplitude,
                period_days,
                phase,
            } => {
                if !(level.is_finite() && amplitude.is_finite() && phase.is_finite()) {
                    return Err(Error::domain("seasonality parameters must be finite"));
                }
                if !(period_days > 0.0) {
                    return Err(Error::domain("seasonality period must be > 0"));
                }
            }
        }
        Ok(())
    }

    /// Geometric spot models multiply by the seasonality, so it must stay
    /// strictly positive.
    pub fn validate_positive(&self) -> Result<()> {
        self.validate()?;
        let min = match *self {
            Seasonality::Constant { level } => level,
            Seasonality::Trig { level, amplitude, .. } => level - amplitude.abs(),
        };
        if !(min > 0.0) {
            return Err(Error::domain(
                "geometric seasonality must be strictly positive",
            ));
        }
        Ok(())
    }
}

/// Factor parameters under the historical measure.
///
/// `X` is the Brownian base factor, `Y` the subordinator-driven spike
/// factor; `mu_y >= 0` and `y0 >= 0` keep `Y` nonnegative pathwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorParams {
    pub mu_x: f64,
    pub alpha_x: f64,
    pub sigma_x: f64,
    pub x0: f64,
    pub mu_y: f64,
    pub alpha_y: f64,
    pub y0: f64,
    pub seasonality: Seasonality,
}

impl FactorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_x > 0.0 && self.alpha_x.is_finite()) {
            return Err(Error::domain("alpha_x must be > 0"));
        }
        if !(self.alpha_y > 0.0 && self.alpha_y.is_finite()) {
            return Err(Error::domain("alpha_y must be > 0"));
        }
        if !(self.sigma_x > 0.0 && self.sigma_x.is_finite()) {
            return Err(Error::domain("sigma_x must be > 0"));
        }
        if !(self.mu_y >= 0.0) {
            return Err(Error::domain("mu_y must be >= 0 (keeps Y nonnegative)"));
        }
        if !(self.y0 >= 0.0) {
            return Err(Error::domain("y0 must be >= 0 (keeps Y nonnegative)"));
        }
        if !(self.mu_x.is_finite() && self.x0.is_finite()) {
            return Err(Error::domain("mu_x and x0 must be finite"));
        }
        self.seasonality.validate()
    }
}

/// Measure-change parameters `(theta1, theta2, beta1, beta2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureChange {
    pub theta1: f64,
    pub theta2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl MeasureChange {
    pub fn new(theta1: f64, theta2: f64, beta1: f64, beta2: f64) -> Self {
        Self { theta1, theta2, beta1, beta2 }
    }

    /// The identity change: `Q = P`.
    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.theta1 == 0.0 && self.theta2 == 0.0 && self.beta1 == 0.0 && self.beta2 == 0.0
    }

    fn validate_base(&self) -> Result<()> {
        if !(self.theta1.is_finite() && self.theta2.is_finite()) {
            return Err(Error::domain("theta parameters must be finite"));
        }
        if !(0.0..=1.0).contains(&self.beta1) {
            return Err(Error::domain("beta1 outside [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.beta2) {
            return Err(Error::domain("beta2 outside [0, 1]"));
        }
        Ok(())
    }

    /// Validation for arithmetic-model use: `theta2` must lie in `D_L`.
    pub fn validate_arithmetic(&self, model: &LevyModel) -> Result<()> {
        self.validate_base()?;
        if !model.domains().contains_d_l(self.theta2) {
            return Err(Error::domain(format!(
                "theta2 = {} outside D_L = (-inf, {})",
                self.theta2,
                model.domains().d_l_sup
            )));
        }
        Ok(())
    }

    /// Validation for geometric-model use: `theta2` must lie in `D_L^g`
    /// and the subordinator must have `theta_max > 1`.
    pub fn validate_geometric(&self, model: &LevyModel) -> Result<()> {
        self.validate_base()?;
        if model.theta_max() <= 1.0 {
            return Err(Error::domain(format!(
                "geometric model requires theta_max > 1, got {}",
                model.theta_max()
            )));
        }
        if !model.domains().contains_d_l_g(self.theta2) {
            return Err(Error::domain(format!(
                "theta2 = {} outside D_L^g = (-inf, {})",
                self.theta2,
                model.domains().d_l_g_sup
            )));
        }
        Ok(())
    }
}

/// Factor parameters as seen under the pricing measure.
///
/// A distinct type from [`FactorParams`] so that pricing code cannot
/// accidentally be fed historical parameters. Speeds equal to zero flag
/// the non-stationary `beta = 1` cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorParamsQ {
    pub mu_x: f64,
    pub alpha_x: f64,
    pub sigma_x: f64,
    pub x0: f64,
    pub mu_y: f64,
    pub alpha_y: f64,
    pub y0: f64,
    /// `beta1 = 1`: X is a drifted Brownian motion under Q.
    pub x_is_drifted_brownian: bool,
    /// `beta2 = 1`: Y loses mean reversion under Q.
    pub y_is_nonstationary: bool,
    pub seasonality: Seasonality,
}

/// Girsanov kernel for the Brownian factor:
/// `(theta1 + alpha_X beta1 x) / sigma_X`.
pub fn girsanov_kernel(fp: &FactorParams, mc: &MeasureChange, x: f64) -> f64 {
    (mc.theta1 + fp.alpha_x * mc.beta1 * x) / fp.sigma_x
}

/// State-dependent jump tilt:
/// `H(y, z) = e^{theta2 z} (1 + alpha_Y beta2 z y / kappa''(theta2))`.
///
/// Strictly positive for `y >= 0`, which makes the induced density
/// process strictly positive.
pub fn jump_kernel(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    y: f64,
    z: f64,
) -> Result<f64> {
    if !model.domains().contains_d_l(mc.theta2) {
        return Err(Error::domain(format!(
            "theta2 = {} outside D_L = (-inf, {})",
            mc.theta2,
            model.domains().d_l_sup
        )));
    }
    if !(y >= 0.0) {
        return Err(Error::domain(format!("jump_kernel requires y >= 0, got {y}")));
    }
    if !(z > 0.0) {
        return Err(Error::domain(format!("jump_kernel requires z > 0, got {z}")));
    }
    let k2 = model.cumulant(mc.theta2, 2)?;
    Ok((mc.theta2 * z).exp() * (1.0 + fp.alpha_y * mc.beta2 * z * y / k2))
}

/// Alternative jump tilt for finite-activity subordinators:
/// `M(y, z) = e^{theta2 z} (1 + alpha_Y beta2 y / kappa'(theta2))`.
///
/// Exposed for simulation experiments only; the pricing formulas are
/// derived for [`jump_kernel`]. Rejected for tempered stable, whose Lévy
/// measure has infinite mass for every `alpha` in `[0, 1)`.
pub fn jump_kernel_finite_activity(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    y: f64,
    z: f64,
) -> Result<f64> {
    if !model.has_finite_activity() {
        return Err(Error::UnsupportedModel(
            "the finite-activity kernel requires a finite Lévy measure".into(),
        ));
    }
    if !model.domains().contains_d_l(mc.theta2) {
        return Err(Error::domain(format!(
            "theta2 = {} outside D_L = (-inf, {})",
            mc.theta2,
            model.domains().d_l_sup
        )));
    }
    if !(y >= 0.0) {
        return Err(Error::domain(format!(
            "jump_kernel_finite_activity requires y >= 0, got {y}"
        )));
    }
    if !(z > 0.0) {
        return Err(Error::domain(format!(
            "jump_kernel_finite_activity requires z > 0, got {z}"
        )));
    }
    let k1 = model.cumulant(mc.theta2, 1)?;
    Ok((mc.theta2 * z).exp() * (1.0 + fp.alpha_y * mc.beta2 * y / k1))
}

/// Factor parameters under the pricing measure.
pub fn q_dynamics(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
) -> Result<FactorParamsQ> {
    fp.validate()?;
    mc.validate_arithmetic(model)?;
    Ok(FactorParamsQ {
        mu_x: fp.mu_x + mc.theta1,
        alpha_x: fp.alpha_x * (1.0 - mc.beta1),
        sigma_x: fp.sigma_x,
        x0: fp.x0,
        mu_y: fp.mu_y + model.cumulant(mc.theta2, 1)?,
        alpha_y: fp.alpha_y * (1.0 - mc.beta2),
        y0: fp.y0,
        x_is_drifted_brownian: mc.beta1 == 1.0,
        y_is_nonstationary: mc.beta2 == 1.0,
        seasonality: fp.seasonality,
    })
}
