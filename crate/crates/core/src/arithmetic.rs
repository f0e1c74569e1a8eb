//! Closed-form pricing for the arithmetic spot model
//! `S(t) = seasonality(t) + X(t) + Y(t)`.
//!
//! Conditional expectations under both measures are sums of damped
//! exponentials, so forwards, swaps and risk premia all evaluate in
//! closed form. Every `(1 - e^{-a(1-b)tau}) / (a(1-b))` factor is routed
//! through [`special::eta`] so that the non-stationary `beta = 1` limit
//! is continuous and exact.

use crate::curve::{CurveMeta, CurveResult, Method, ModelKind};
use crate::error::Error;
use crate::levy::LevyModel;
use crate::measure::{FactorParams, MeasureChange};
use crate::quad::adaptive_simpson;
use crate::special::eta;
use crate::Result;

/// Observed factor levels at the pricing date.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketState {
    /// Current time in days.
    pub t: f64,
    /// Base-factor level `X(t)`.
    pub x: f64,
    /// Spike-factor level `Y(t)`, nonnegative.
    pub y: f64,
}

impl MarketState {
    pub fn new(t: f64, x: f64, y: f64) -> Result<Self> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::domain("state time must be finite and >= 0"));
        }
        if !x.is_finite() {
            return Err(Error::domain("state x must be finite"));
        }
        if !(y >= 0.0 && y.is_finite()) {
            return Err(Error::domain("state y must be finite and >= 0"));
        }
        Ok(Self { t, x, y })
    }
}

fn time_to_maturity(state: &MarketState, maturity: f64) -> Result<f64> {
    if maturity < state.t {
        return Err(Error::domain(format!(
            "maturity {maturity} precedes current time {}",
            state.t
        )));
    }
    Ok(maturity - state.t)
}

/// Conditional expected spot under the historical measure.
pub fn expected_spot(
    model: &LevyModel,
    fp: &FactorParams,
    state: &MarketState,
    maturity: f64,
) -> Result<f64> {
    fp.validate()?;
    let tau = time_to_maturity(state, maturity)?;
    let k1_0 = model.cumulant(0.0, 1)?;
    Ok(fp.seasonality.eval(maturity)
        + state.x * (-fp.alpha_x * tau).exp()
        + state.y * (-fp.alpha_y * tau).exp()
        + fp.mu_x * tau * eta(fp.alpha_x * tau)
        + (fp.mu_y + k1_0) * tau * eta(fp.alpha_y * tau))
}

/// Forward price under the pricing measure; reduces to [`expected_spot`]
/// at the zero measure change.
pub fn forward_price(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
    maturity: f64,
) -> Result<f64> {
    fp.validate()?;
    mc.validate_arithmetic(model)?;
    let tau = time_to_maturity(state, maturity)?;
    let ax = fp.alpha_x * (1.0 - mc.beta1);
    let ay = fp.alpha_y * (1.0 - mc.beta2);
    let k1 = model.cumulant(mc.theta2, 1)?;
    Ok(fp.seasonality.eval(maturity)
        + state.x * (-ax * tau).exp()
        + state.y * (-ay * tau).exp()
        + (fp.mu_x + mc.theta1) * tau * eta(ax * tau)
        + (fp.mu_y + k1) * tau * eta(ay * tau))
}

/// Risk premium `F_Q(t, T) - E_P[S(T) | F_t]`, evaluated through the
/// seasonality-free closed form (the seasonality cancels exactly).
pub fn risk_premium(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
    maturity: f64,
) -> Result<f64> {
    fp.validate()?;
    mc.validate_arithmetic(model)?;
    let tau = time_to_maturity(state, maturity)?;
    let ax_q = fp.alpha_x * (1.0 - mc.beta1);
    let ay_q = fp.alpha_y * (1.0 - mc.beta2);
    let k1_q = model.cumulant(mc.theta2, 1)?;
    let k1_p = model.cumulant(0.0, 1)?;
    Ok(
        state.x * damped_gap(fp.alpha_x, mc.beta1, tau)
            + state.y * damped_gap(fp.alpha_y, mc.beta2, tau)
            + (fp.mu_x + mc.theta1) * tau * eta(ax_q * tau)
            - fp.mu_x * tau * eta(fp.alpha_x * tau)
            + (fp.mu_y + k1_q) * tau * eta(ay_q * tau)
            - (fp.mu_y + k1_p) * tau * eta(fp.alpha_y * tau),
    )
}

/// `e^{-a tau}(e^{a b tau} - 1)`, written with nonpositive exponents
/// only so that large maturities cannot overflow.
pub(crate) fn damped_gap(alpha: f64, beta: f64, tau: f64) -> f64 {
    -(-alpha * (1.0 - beta) * tau).exp() * f64::exp_m1(-alpha * beta * tau)
}

/// Long-maturity limit and short-end slope of the risk premium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RpLimits {
    pub limit_infinity: f64,
    pub slope_at_zero: f64,
}

/// Limits of the premium curve under the zero-drift hypothesis
/// `mu_X = mu_Y = 0`, for `beta1, beta2 < 1` (the limit diverges at 1).
pub fn rp_limits(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
) -> Result<RpLimits> {
    fp.validate()?;
    mc.validate_arithmetic(model)?;
    if fp.mu_x != 0.0 || fp.mu_y != 0.0 {
        return Err(Error::domain(
            "rp_limits requires mu_x = mu_y = 0 (zero-drift hypothesis)",
        ));
    }
    if mc.beta1 >= 1.0 || mc.beta2 >= 1.0 {
        return Err(Error::domain(
            "rp_limits requires beta1, beta2 in [0, 1): the limit diverges at beta = 1",
        ));
    }
    let k1_q = model.cumulant(mc.theta2, 1)?;
    let k1_p = model.cumulant(0.0, 1)?;
    let limit_infinity = mc.theta1 / (fp.alpha_x * (1.0 - mc.beta1))
        + (k1_q - k1_p) / (fp.alpha_y * (1.0 - mc.beta2))
        + (k1_p / fp.alpha_y) * mc.beta2 / (1.0 - mc.beta2);
    let slope_at_zero =
        state.x * fp.alpha_x * mc.beta1 + state.y * fp.alpha_y * mc.beta2 + mc.theta1 + k1_q
            - k1_p;
    Ok(RpLimits { limit_infinity, slope_at_zero })
}

/// The nonnegative gap function
/// `Lambda(x, y) = (1 - e^{-x y}) / y - (1 - e^{-x})` for `x >= 0`,
/// `y in [0, 1]`, extended by continuity to `y = 0`.
pub fn lambda_fn(x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("lambda_fn requires x >= 0, got {x}")));
    }
    if !(0.0..=1.0).contains(&y) {
        return Err(Error::domain(format!(
            "lambda_fn requires y in [0, 1], got {y}"
        )));
    }
    let g = |v: f64| -f64::exp_m1(-v);
    // Sharing the primitive makes Lambda(x, 1) an exact zero.
    if y == 0.0 {
        Ok(x - g(x))
    } else {
        Ok(g(x * y) / y - g(x))
    }
}

/// The two inequalities that produce the empirically observed premium
/// profile: positive short end, negative long end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignConditions {
    pub short_end_positive: bool,
    pub long_end_negative: bool,
}

pub fn sign_conditions(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
) -> Result<SignConditions> {
    let limits = rp_limits(model, fp, mc, state)?;
    Ok(SignConditions {
        short_end_positive: limits.slope_at_zero > 0.0,
        long_end_negative: limits.limit_infinity < 0.0,
    })
}

fn check_delivery(state: &MarketState, t1: f64, t2: f64) -> Result<()> {
    if !(state.t < t1 && t1 < t2) {
        return Err(Error::domain(format!(
            "delivery period must satisfy t < T1 < T2, got t = {}, T1 = {t1}, T2 = {t2}",
            state.t
        )));
    }
    Ok(())
}

const SWAP_REL_TOL: f64 = 1e-9;

/// Swap price: the delivery-period average of fixed-maturity forwards,
/// by adaptive quadrature.
pub fn swap_price(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
    t1: f64,
    t2: f64,
) -> Result<f64> {
    check_delivery(state, t1, t2)?;
    // Surface argument errors before entering the quadrature.
    forward_price(model, fp, mc, state, t1)?;
    let integral = adaptive_simpson(
        |maturity| forward_price(model, fp, mc, state, maturity).expect("validated above"),
        t1,
        t2,
        SWAP_REL_TOL,
        1e-14,
    )?;
    Ok(integral / (t2 - t1))
}

/// Swap risk premium: the delivery-period average of the fixed-maturity
/// risk premium.
pub fn swap_risk_premium(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
    t1: f64,
    t2: f64,
) -> Result<f64> {
    check_delivery(state, t1, t2)?;
    risk_premium(model, fp, mc, state, t1)?;
    let integral = adaptive_simpson(
        |maturity| risk_premium(model, fp, mc, state, maturity).expect("validated above"),
        t1,
        t2,
        SWAP_REL_TOL,
        1e-14,
    )?;
    Ok(integral / (t2 - t1))
}

/// Risk-premium curve over a grid of times-to-maturity.
pub fn risk_premium_curve(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
    taus: &[f64],
) -> Result<CurveResult> {
    let values = taus
        .iter()
        .map(|&tau| risk_premium(model, fp, mc, state, state.t + tau))
        .collect::<Result<Vec<_>>>()?;
    CurveResult::new(
        taus.to_vec(),
        values,
        CurveMeta {
            model: ModelKind::Arithmetic,
            measure: *mc,
            method: Method::ClosedForm,
            standard_errors: None,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Seasonality;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn cpe() -> LevyModel {
        LevyModel::CompoundPoissonExp { c: 0.4, lambda: 2.0 }
    }

    fn fp() -> FactorParams {
        FactorParams {
            mu_x: 0.0,
            alpha_x: 0.099,
            sigma_x: 0.0158,
            x0: 0.0,
            mu_y: 0.0,
            alpha_y: 0.3466,
            y0: 0.0,
            seasonality: Seasonality::Constant { level: 0.0 },
        }
    }

    #[test]
    fn expected_spot_collapses_at_maturity_equal_now() {
        let state = MarketState::new(0.0, -0.5, 0.5).unwrap();
        let v = expected_spot(&cpe(), &fp(), &state, 0.0).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expected_spot_seven_days_out() {
        // Direct evaluation of the damped-exponential formula with
        // kappa'(0) = 0.1; cross-checked by Monte Carlo elsewhere.
        let state = MarketState::new(0.0, -0.5, 0.5).unwrap();
        let v = expected_spot(&cpe(), &fp(), &state, 7.0).unwrap();
        assert_relative_eq!(v, 0.057169400242, max_relative = 1e-10);
    }

    #[test]
    fn expected_spot_compensator_term_only() {
        let state = MarketState::new(0.0, 0.0, 0.0).unwrap();
        for &tau in &[1.0, 10.0, 100.0] {
            let v = expected_spot(&cpe(), &fp(), &state, tau).unwrap();
            let k1_over_ay = 0.1 / 0.3466;
            assert_relative_eq!(
                v,
                k1_over_ay * (1.0 - (-0.3466 * tau).exp()),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn forward_reduces_to_expected_spot_at_zero_change() {
        let state = MarketState::new(0.0, 1.3, 0.4).unwrap();
        for &tau in &[0.0, 3.0, 50.0] {
            let f = forward_price(&cpe(), &fp(), &MeasureChange::zero(), &state, tau).unwrap();
            let e = expected_spot(&cpe(), &fp(), &state, tau).unwrap();
            assert_abs_diff_eq!(f, e, epsilon = 1e-15);
        }
    }

    #[test]
    fn forward_esscher_spike_term() {
        // theta = (0, 0.5), beta = 0, x = y = 0, tau = 7:
        // kappa'(0.5)/alpha_Y (1 - e^{-alpha_Y 7}).
        let state = MarketState::new(0.0, 0.0, 0.0).unwrap();
        let mc = MeasureChange::new(0.0, 0.5, 0.0, 0.0);
        let v = forward_price(&cpe(), &fp(), &mc, &state, 7.0).unwrap();
        assert_relative_eq!(v, 0.467591455291, max_relative = 1e-10);
    }

    #[test]
    fn forward_with_beta1_one_keeps_x_undamped() {
        // At beta1 = 1 the base factor enters the forward without decay
        // and the drift term grows linearly.
        let state = MarketState::new(0.0, 2.5, 0.0).unwrap();
        let mc = MeasureChange::new(0.3, 0.0, 1.0, 0.0);
        let tau = 200.0;
        let f = forward_price(&cpe(), &fp(), &mc, &state, tau).unwrap();
        let y_and_kappa = (0.1 / 0.3466) * (1.0 - (-0.3466 * tau).exp());
        assert_relative_eq!(f - y_and_kappa, 2.5 + 0.3 * tau, max_relative = 1e-12);
    }

    #[test]
    fn premium_is_forward_minus_expected_spot() {
        let state = MarketState::new(2.0, -1.0, 0.7).unwrap();
        let mc = MeasureChange::new(-0.1, 0.6, 0.25, 0.4);
        for &tau in &[0.5, 7.0, 90.0] {
            let t = 2.0 + tau;
            let rp = risk_premium(&cpe(), &fp(), &mc, &state, t).unwrap();
            let diff = forward_price(&cpe(), &fp(), &mc, &state, t).unwrap()
                - expected_spot(&cpe(), &fp(), &state, t).unwrap();
            assert_abs_diff_eq!(rp, diff, epsilon = 1e-13);
        }
    }

    #[test]
    fn premium_vanishes_identically_at_zero_change() {
        let state = MarketState::new(0.0, 3.0, 1.5).unwrap();
        for &tau in &[0.0, 1.0, 30.0, 360.0] {
            let rp = risk_premium(&cpe(), &fp(), &MeasureChange::zero(), &state, tau).unwrap();
            assert_eq!(rp, 0.0);
        }
    }

    #[test]
    fn premium_is_seasonality_invariant() {
        let state = MarketState::new(0.0, -0.5, 0.5).unwrap();
        let mc = MeasureChange::new(-0.1, 0.95, 0.0, 0.0);
        let base = risk_premium(&cpe(), &fp(), &mc, &state, 30.0).unwrap();
        let seasonal = [
            Seasonality::Constant { level: 1e6 },
            Seasonality::Trig { level: 40.0, amplitude: 12.0, period_days: 365.0, phase: 1.0 },
        ];
        for s in seasonal {
            let mut fps = fp();
            fps.seasonality = s;
            assert_eq!(risk_premium(&cpe(), &fps, &mc, &state, 30.0).unwrap(), base);
        }
    }

    #[test]
    fn rp_limits_frozen_values() {
        let state = MarketState::new(0.0, 0.0, 0.0).unwrap();
        assert_eq!(
            rp_limits(&cpe(), &fp(), &MeasureChange::zero(), &state).unwrap(),
            RpLimits { limit_infinity: 0.0, slope_at_zero: 0.0 }
        );

        // Closed-form substitution with kappa'(0.95) = 0.4/1.05^2.
        let mc = MeasureChange::new(-0.1, 0.95, 0.0, 0.0);
        let l = rp_limits(&cpe(), &fp(), &mc, &state).unwrap();
        assert_relative_eq!(l.limit_infinity, -0.251844254812, max_relative = 1e-9);
        assert_relative_eq!(l.slope_at_zero, 0.162811791383, max_relative = 1e-9);

        let mc = MeasureChange::new(0.0, 0.0, 0.0, 0.5);
        let l = rp_limits(&cpe(), &fp(), &mc, &state).unwrap();
        assert_relative_eq!(l.limit_infinity, 0.288517022504, max_relative = 1e-9);
        assert_abs_diff_eq!(l.slope_at_zero, 0.0);
    }

    #[test]
    fn rp_limits_enforces_hypotheses() {
        let state = MarketState::new(0.0, 0.0, 0.0).unwrap();
        let mut drifted = fp();
        drifted.mu_x = 0.1;
        assert!(rp_limits(&cpe(), &drifted, &MeasureChange::zero(), &state).is_err());
        let mc = MeasureChange::new(0.0, 0.0, 1.0, 0.0);
        assert!(rp_limits(&cpe(), &fp(), &mc, &state).is_err());
    }

    #[test]
    fn premium_approaches_its_limits() {
        let state = MarketState::new(0.0, 0.4, 0.2).unwrap();
        let mc = MeasureChange::new(-0.1, 0.6, 0.5, 0.5);
        let limits = rp_limits(&cpe(), &fp(), &mc, &state).unwrap();
        let far = risk_premium(&cpe(), &fp(), &mc, &state, 1e4).unwrap();
        assert_abs_diff_eq!(far, limits.limit_infinity, epsilon = 1e-6);
        let h = 1e-4;
        let slope = risk_premium(&cpe(), &fp(), &mc, &state, h).unwrap() / h;
        assert_abs_diff_eq!(slope, limits.slope_at_zero, epsilon = 1e-6);
    }

    #[test]
    fn lambda_fn_values_and_limits() {
        assert_abs_diff_eq!(lambda_fn(2.0, 1.0).unwrap(), 0.0);
        assert_relative_eq!(
            lambda_fn(2.0, 0.5).unwrap(),
            0.399576400894,
            max_relative = 1e-11
        );
        // y -> 0 continuation: x - (1 - e^{-x}).
        assert_relative_eq!(
            lambda_fn(2.0, 0.0).unwrap(),
            2.0 - (1.0 - (-2.0f64).exp()),
            max_relative = 1e-12
        );
        // x -> infinity limit (1 - y)/y.
        assert_abs_diff_eq!(lambda_fn(200.0, 0.5).unwrap(), 1.0, epsilon = 1e-10);
        assert!(lambda_fn(-1.0, 0.5).is_err());
        assert!(lambda_fn(1.0, 1.5).is_err());
    }

    #[test]
    fn sign_condition_examples() {
        let state = MarketState::new(0.0, 0.0, 0.0).unwrap();
        let sc = sign_conditions(&cpe(), &fp(), &MeasureChange::zero(), &state).unwrap();
        assert_eq!(sc, SignConditions { short_end_positive: false, long_end_negative: false });

        let mc = MeasureChange::new(-0.1, 0.95, 0.0, 0.0);
        let sc = sign_conditions(&cpe(), &fp(), &mc, &state).unwrap();
        assert_eq!(sc, SignConditions { short_end_positive: true, long_end_negative: true });

        let mc = MeasureChange::new(0.075, 0.0, 0.0, 0.0);
        let sc = sign_conditions(&cpe(), &fp(), &mc, &state).unwrap();
        assert_eq!(sc, SignConditions { short_end_positive: true, long_end_negative: false });
    }

    #[test]
    fn swap_collapses_to_the_fixed_delivery_value() {
        let state = MarketState::new(0.0, 0.3, 0.2).unwrap();
        let mc = MeasureChange::new(-0.1, 0.95, 0.0, 0.0);
        let swap = swap_risk_premium(&cpe(), &fp(), &mc, &state, 30.0, 30.0 + 1e-7).unwrap();
        let fixed = risk_premium(&cpe(), &fp(), &mc, &state, 30.0).unwrap();
        assert_abs_diff_eq!(swap, fixed, epsilon = 1e-8);
    }

    #[test]
    fn swap_premium_zero_at_zero_change_and_negative_for_flipped_profile() {
        let state = MarketState::new(0.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            swap_risk_premium(&cpe(), &fp(), &MeasureChange::zero(), &state, 30.0, 60.0).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        // The (-0.1, 0.95) profile is already negative past its early
        // sign flip, so the [30, 60] average is negative.
        let mc = MeasureChange::new(-0.1, 0.95, 0.0, 0.0);
        assert!(swap_risk_premium(&cpe(), &fp(), &mc, &state, 30.0, 60.0).unwrap() < 0.0);
    }

    #[test]
    fn swap_rejects_bad_delivery_ordering() {
        let state = MarketState::new(10.0, 0.0, 0.0).unwrap();
        assert!(swap_price(&cpe(), &fp(), &MeasureChange::zero(), &state, 5.0, 20.0).is_err());
        assert!(swap_price(&cpe(), &fp(), &MeasureChange::zero(), &state, 20.0, 20.0).is_err());
    }

    #[test]
    fn maturity_before_now_is_rejected() {
        let state = MarketState::new(5.0, 0.0, 0.0).unwrap();
        assert!(expected_spot(&cpe(), &fp(), &state, 4.0).is_err());
        assert!(forward_price(&cpe(), &fp(), &MeasureChange::zero(), &state, 4.0).is_err());
    }
}
