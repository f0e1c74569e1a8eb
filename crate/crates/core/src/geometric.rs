//! Exp-affine pricing for the geometric spot model
//! `S(t) = seasonality(t) * exp(X(t) + Y(t))`.
//!
//! The spike-factor exponential moment comes from the generalized
//! Riccati solution; the Brownian part stays Gaussian in closed form.
//! Forwards therefore require `theta_max > 1` and a Case 1 or Case 2
//! classification; blowing-up parameter sets are refused rather than
//! extrapolated.

use crate::arithmetic::{lambda_fn, MarketState};
use crate::error::Error;
use crate::levy::LevyModel;
use crate::measure::{FactorParams, MeasureChange};
use crate::quad::adaptive_simpson;
use crate::riccati::{CaseTag, RiccatiSolution};
use crate::special::eta;
use crate::Result;

pub use crate::special::exp_integral_ei;

/// `int_0^tau kappa(e^{-alpha_y s}) ds`: the log of the spike factor's
/// exponential moment under the historical measure, net of the
/// mean-reversion drift terms.
pub fn spike_log_moment(model: &LevyModel, alpha_y: f64, tau: f64) -> Result<f64> {
    if model.theta_max() <= 1.0 {
        return Err(Error::domain(format!(
            "spike exponential moment requires theta_max > 1, got {}",
            model.theta_max()
        )));
    }
    if !(tau >= 0.0) {
        return Err(Error::domain("tau must be >= 0"));
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    let f = |s: f64| {
        model
            .cumulant((-alpha_y * s).exp(), 0)
            .expect("integrand stays inside (0, 1] subset of the cumulant domain")
    };
    adaptive_simpson(f, 0.0, tau, 1e-11, 1e-15)
}

/// Conditional expected spot under the historical measure.
pub fn expected_spot_geom(
    model: &LevyModel,
    fp: &FactorParams,
    state: &MarketState,
    maturity: f64,
) -> Result<f64> {
    fp.validate()?;
    fp.seasonality.validate_positive()?;
    if maturity < state.t {
        return Err(Error::domain(format!(
            "maturity {maturity} precedes current time {}",
            state.t
        )));
    }
    let tau = maturity - state.t;
    let exponent = state.x * (-fp.alpha_x * tau).exp()
        + state.y * (-fp.alpha_y * tau).exp()
        + fp.mu_x * tau * eta(fp.alpha_x * tau)
        + fp.mu_y * tau * eta(fp.alpha_y * tau)
        + 0.5 * fp.sigma_x * fp.sigma_x * tau * eta(2.0 * fp.alpha_x * tau)
        + spike_log_moment(model, fp.alpha_y, tau)?;
    Ok(fp.seasonality.eval(maturity) * exponent.exp())
}

fn check_solution(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    sol: &RiccatiSolution,
    tau: f64,
) -> Result<()> {
    if !sol.matches(model, fp, mc) {
        return Err(Error::domain(
            "riccati solution was produced for different parameters",
        ));
    }
    if sol.case_tag == CaseTag::Case3 {
        return Err(Error::BlowUp {
            t_infinity: sol.t_infinity.unwrap_or(f64::NAN),
            horizon: tau,
        });
    }
    if tau > sol.horizon() * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::domain(format!(
            "riccati solution horizon {} does not cover tau = {tau}",
            sol.horizon()
        )));
    }
    Ok(())
}

/// Forward price under the pricing measure, via the exp-affine formula
/// for the spike factor and the Gaussian closed form for the base
/// factor.
pub fn forward_price_geom(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
    maturity: f64,
    sol: &RiccatiSolution,
) -> Result<f64> {
    fp.validate()?;
    fp.seasonality.validate_positive()?;
    mc.validate_geometric(model)?;
    if maturity < state.t {
        return Err(Error::domain(format!(
            "maturity {maturity} precedes current time {}",
            state.t
        )));
    }
    let tau = maturity - state.t;
    check_solution(model, fp, mc, sol, tau)?;
    let (psi1, psi0) = sol.eval(tau)?;
    let ax_q = fp.alpha_x * (1.0 - mc.beta1);
    let exponent = state.x * (-ax_q * tau).exp()
        + state.y * psi1
        + psi0
        + (fp.mu_x + mc.theta1) * tau * eta(ax_q * tau)
        + 0.5 * fp.sigma_x * fp.sigma_x * tau * eta(2.0 * ax_q * tau);
    Ok(fp.seasonality.eval(maturity) * exponent.exp())
}

/// The labeled sign decomposition of the geometric premium: the premium
/// equals `E_P[S] * (e^Sigma - 1)`, so its sign is the sign of
/// `sigma_total`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomPremiumDecomposition {
    /// `x e^{-alpha_X tau} (e^{alpha_X beta1 tau} - 1)`.
    pub base_factor_term: f64,
    /// `y (psi1(tau) - e^{-alpha_Y tau})`.
    pub spike_term: f64,
    /// Level-shift contribution of `theta1` (and `mu_X` when nonzero).
    pub level_shift_term: f64,
    /// `(sigma_X^2 / 4 alpha_X) Lambda(2 alpha_X tau, 1 - beta1)`.
    pub variance_term: f64,
    /// `psi0(tau) - psi0 at the zero change` (net of `mu_Y` terms).
    pub psi0_diff_term: f64,
    pub sigma_total: f64,
}

fn sigma_terms(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
    tau: f64,
    sol: &RiccatiSolution,
) -> Result<GeomPremiumDecomposition> {
    let (psi1, psi0) = sol.eval(tau)?;
    let ax_q = fp.alpha_x * (1.0 - mc.beta1);
    let base_factor_term = state.x * crate::arithmetic::damped_gap(fp.alpha_x, mc.beta1, tau);
    let spike_term = state.y * (psi1 - (-fp.alpha_y * tau).exp());
    let level_shift_term =
        (fp.mu_x + mc.theta1) * tau * eta(ax_q * tau) - fp.mu_x * tau * eta(fp.alpha_x * tau);
    let variance_term = fp.sigma_x * fp.sigma_x / (4.0 * fp.alpha_x)
        * lambda_fn(2.0 * fp.alpha_x * tau, 1.0 - mc.beta1)?;
    let psi0_diff_term = psi0
        - fp.mu_y * tau * eta(fp.alpha_y * tau)
        - spike_log_moment(model, fp.alpha_y, tau)?;
    let sigma_total =
        base_factor_term + spike_term + level_shift_term + variance_term + psi0_diff_term;
    Ok(GeomPremiumDecomposition {
        base_factor_term,
        spike_term,
        level_shift_term,
        variance_term,
        psi0_diff_term,
        sigma_total,
    })
}

/// Risk premium `F_Q - E_P[S]`, evaluated as
/// `E_P[S] * expm1(sigma_total)` so that the sign is carried by the
/// decomposition exactly.
pub fn risk_premium_geom(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
    maturity: f64,
    sol: &RiccatiSolution,
) -> Result<f64> {
    if mc.is_zero() {
        // Q = P: the premium vanishes identically.
        expected_spot_geom(model, fp, state, maturity)?;
        return Ok(0.0);
    }
    fp.validate()?;
    fp.seasonality.validate_positive()?;
    mc.validate_geometric(model)?;
    let tau = maturity - state.t;
    check_solution(model, fp, mc, sol, tau)?;
    let expected = expected_spot_geom(model, fp, state, maturity)?;
    let sigma = sigma_terms(model, fp, mc, state, tau, sol)?;
    Ok(expected * f64::exp_m1(sigma.sigma_total))
}

/// Sign decomposition of the geometric premium under the zero-drift
/// hypothesis `mu_X = mu_Y = 0` with `alpha_X < alpha_Y`, for a Case 1
/// (or Case 2) solution.
pub fn sigma_fn(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
    tau: f64,
    sol: &RiccatiSolution,
) -> Result<GeomPremiumDecomposition> {
    fp.validate()?;
    mc.validate_geometric(model)?;
    if fp.mu_x != 0.0 || fp.mu_y != 0.0 {
        return Err(Error::domain(
            "sigma_fn requires mu_x = mu_y = 0 (zero-drift hypothesis)",
        ));
    }
    if !(fp.alpha_x < fp.alpha_y) {
        return Err(Error::domain(
            "sigma_fn requires alpha_x < alpha_y (spikes revert fastest)",
        ));
    }
    if sol.case_tag == CaseTag::Case3 {
        return Err(Error::WrongCase { expected: CaseTag::Case1, actual: CaseTag::Case3 });
    }
    check_solution(model, fp, mc, sol, tau)?;
    sigma_terms(model, fp, mc, state, tau, sol)
}

/// Long-maturity limit and short-end slope of the sign function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaLimits {
    pub limit_infinity: f64,
    pub slope_at_zero: f64,
}

/// Limits of the geometric sign function. The infinite-horizon integral
/// of `kappa(theta2 + psi1(t)) - kappa(theta2) - kappa(e^{-alpha_Y t})`
/// is evaluated as `psi0(T) - psi0_P(T)` at a truncation chosen so that
/// both integrands have decayed below 1e-12, plus analytic exponential
/// tails at the rates `-alpha_Y (1 - beta2)` and `-alpha_Y`.
pub fn sigma_limits(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    state: &MarketState,
    sol: &RiccatiSolution,
) -> Result<SigmaLimits> {
    fp.validate()?;
    mc.validate_geometric(model)?;
    if fp.mu_x != 0.0 || fp.mu_y != 0.0 {
        return Err(Error::domain(
            "sigma_limits requires mu_x = mu_y = 0 (zero-drift hypothesis)",
        ));
    }
    if !(fp.alpha_x < fp.alpha_y) {
        return Err(Error::domain(
            "sigma_limits requires alpha_x < alpha_y (spikes revert fastest)",
        ));
    }
    if mc.beta1 >= 1.0 {
        return Err(Error::domain(
            "sigma_limits requires beta1 < 1: the limit diverges at beta1 = 1",
        ));
    }
    if sol.case_tag == CaseTag::Case3 {
        return Err(Error::WrongCase { expected: CaseTag::Case1, actual: CaseTag::Case3 });
    }
    if !sol.matches(model, fp, mc) {
        return Err(Error::domain(
            "riccati solution was produced for different parameters",
        ));
    }

    let k2 = model.cumulant(mc.theta2, 2)?;
    let slope_at_zero = state.x * fp.alpha_x * mc.beta1
        + state.y * fp.alpha_y * mc.beta2 * model.cumulant_diff(mc.theta2, 1.0, 1)? / k2
        + mc.theta1
        + model.cumulant_diff(mc.theta2, 1.0, 0)?
        - model.cumulant(1.0, 0)?;

    // Truncation horizon: both e^{-alpha_Y t} and psi1 (rate
    // alpha_Y (1 - beta2), or alpha_Y in Case 2 where psi1 stays 1 the
    // integrand difference is constant -- Case 2 has no finite limit).
    if sol.case_tag == CaseTag::Case2 {
        return Err(Error::domain(
            "sigma_limits is undefined for Case 2: psi0 grows linearly",
        ));
    }
    let decay = fp.alpha_y * (1.0 - mc.beta2);
    let t_trunc = (27.7 / decay).max(27.7 / fp.alpha_y) * 1.2;
    let long = if sol.horizon() >= t_trunc {
        sol.clone()
    } else {
        crate::riccati::solve_riccati(model, fp, mc, t_trunc, 1e-11)?
    };
    let (psi1_end, psi0_end) = long.eval(t_trunc)?;
    let moment_p = spike_log_moment(model, fp.alpha_y, t_trunc)?;
    let tail_q = model.cumulant(mc.theta2, 1)? * psi1_end / decay;
    let tail_p = model.cumulant(0.0, 1)? * (-fp.alpha_y * t_trunc).exp() / fp.alpha_y;
    let integral = psi0_end - moment_p + tail_q - tail_p;

    let limit_infinity = mc.theta1 / (fp.alpha_x * (1.0 - mc.beta1))
        + fp.sigma_x * fp.sigma_x / (4.0 * fp.alpha_x) * mc.beta1 / (1.0 - mc.beta1)
        + integral;
    Ok(SigmaLimits { limit_infinity, slope_at_zero })
}
