//! Generalized Riccati system for the spike factor under the pricing
//! measure.
//!
//! The exponential moment `E_Q[exp(Y(T)) | F_t]` is exp-affine in `Y(t)`
//! with coefficients `(psi1, psi0)` solving
//!
//! ```text
//! psi1' = lam1(psi1),  psi1(0) = 1,
//! psi0' = lam0(psi1),  psi0(0) = 0,
//! ```
//!
//! where `lam0`, `lam1` are the Lévy exponents of the affine dynamics.
//! The vector field `lam1` is convex with a unique positive root
//! `u_star`; its position against 1 decides whether the solution decays
//! globally (Case 1), is stationary (Case 2) or blows up in finite time
//! (Case 3).

use crate::error::Error;
use crate::levy::LevyModel;
use crate::measure::{FactorParams, MeasureChange};
use crate::quad::adaptive_simpson;
use crate::rk::{integrate_adaptive, Controls, State2, Step};
use crate::Result;

/// Default accuracy target for the adaptive solver (per-step local
/// error, relative for the `psi1` component).
pub const DEFAULT_TOL: f64 = 1e-10;

/// Default shrink of the admissible tilt domain used by classification.
pub const CLASSIFY_DELTA: f64 = 1e-6;

/// Tolerance deciding the stationary Case 2, `|u_star - 1| < 1e-10`.
const CASE2_TOL: f64 = 1e-10;

/// Fraction of the domain boundary kept as a guard band when truncating
/// a blowing-up solution: the reported escape time refers to this level.
const BLOWUP_GUARD: f64 = 1e-6;

/// Level at which the stepper itself stops in Case 3. The vector field
/// grows like the inverse square of the boundary distance, so the time
/// left between this level and the guard level is analytically tiny
/// (it is appended by quadrature) while the steps stay resolvable.
const INTEGRATION_GUARD: f64 = 1e-3;

/// Root-finding accuracy for `u_star`.
const U_STAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// `u_star > 1`: global solution, `psi1` decays to zero.
    Case1,
    /// `u_star = 1`: `psi1` is identically one.
    Case2,
    /// `u_star < 1`: finite-time blow-up at `t_infinity`.
    Case3,
}

impl std::fmt::Display for CaseTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CaseTag::Case1 => write!(f, "Case1"),
            CaseTag::Case2 => write!(f, "Case2"),
            CaseTag::Case3 => write!(f, "Case3"),
        }
    }
}

/// Values of the two Lévy exponents at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevyExponents {
    pub lam0: f64,
    pub lam1: f64,
}

/// Lévy exponents of the spike factor under the pricing measure:
///
/// `lam0(u) = mu_Y u + kappa(u + theta2) - kappa(theta2)`,
/// `lam1(u) = -alpha_Y u + (alpha_Y beta2 / kappa''(theta2))
///            (kappa'(u + theta2) - kappa'(theta2))`.
pub fn levy_exponents(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    u: f64,
) -> Result<LevyExponents> {
    if u + mc.theta2 >= model.theta_max() {
        return Err(Error::domain(format!(
            "u + theta2 = {} at or beyond theta_max = {}",
            u + mc.theta2,
            model.theta_max()
        )));
    }
    let lam0 = fp.mu_y * u + model.cumulant_diff(mc.theta2, u, 0)?;
    let k2 = model.cumulant(mc.theta2, 2)?;
    let lam1 = -fp.alpha_y * u + fp.alpha_y * mc.beta2 / k2 * model.cumulant_diff(mc.theta2, u, 1)?;
    Ok(LevyExponents { lam0, lam1 })
}

/// Unique strictly positive root of `lam1`, located by bracketing and
/// bisection (convexity of `lam1` makes the sign change unique).
///
/// Degenerate endpoints are rejected: at `beta2 = 0` the root escapes to
/// the domain boundary, at `beta2 = 1` it collapses to zero.
pub fn u_star(model: &LevyModel, fp: &FactorParams, mc: &MeasureChange) -> Result<f64> {
    fp.validate()?;
    if !(mc.beta2 > 0.0 && mc.beta2 < 1.0) {
        return Err(Error::domain(format!(
            "u_star requires beta2 in (0, 1), got {} (the root degenerates to a boundary)",
            mc.beta2
        )));
    }
    let boundary = model.theta_max() - mc.theta2;
    let lam1 = |u: f64| levy_exponents(model, fp, mc, u).map(|e| e.lam1);

    // lam1 is negative just right of zero; expand the upper end until it
    // turns positive.
    let mut hi = if boundary.is_finite() { 0.5 * boundary } else { 1.0 };
    let mut lo = 0.0;
    for _ in 0..200 {
        match lam1(hi) {
            Ok(v) if v > 0.0 => break,
            Ok(_) => {
                lo = hi;
                hi = if boundary.is_finite() {
                    0.5 * (hi + boundary)
                } else {
                    2.0 * hi
                };
            }
            Err(_) => return Err(Error::Numerical("u_star bracketing failed".into())),
        }
    }
    if !matches!(lam1(hi), Ok(v) if v > 0.0) {
        return Err(Error::Numerical(
            "u_star: no sign change located below the domain boundary".into(),
        ));
    }
    while hi - lo > U_STAR_TOL {
        let mid = 0.5 * (lo + hi);
        if lam1(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Outcome of the global-existence classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub case: CaseTag,
    /// Root of `lam1`; the domain boundary at `beta2 = 0` (possibly
    /// infinite), zero at `beta2 = 1`.
    pub u_star: f64,
    /// Sufficient bound: `beta2` below it guarantees Case 1.
    pub beta_bound: f64,
}

/// Classify the Riccati solution by the position of `u_star` against 1.
pub fn classify(model: &LevyModel, fp: &FactorParams, mc: &MeasureChange) -> Result<Classification> {
    classify_with_delta(model, fp, mc, CLASSIFY_DELTA)
}

pub fn classify_with_delta(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    delta: f64,
) -> Result<Classification> {
    fp.validate()?;
    model.validate()?;
    if model.theta_max() <= 1.0 {
        return Err(Error::domain(format!(
            "classification requires theta_max > 1, got {}",
            model.theta_max()
        )));
    }
    mc.validate_geometric(model)?;
    if !model.domains().contains_d_l_g_delta(mc.theta2, delta) {
        return Err(Error::domain(format!(
            "theta2 = {} outside D_L^g(delta = {delta})",
            mc.theta2
        )));
    }
    let beta_bound = model.cumulant(mc.theta2, 2)? / model.cumulant_diff(mc.theta2, 1.0, 1)?;
    let (case, root) = if mc.beta2 == 0.0 {
        // Esscher limit: the root escapes to the boundary and psi1 decays.
        (CaseTag::Case1, model.theta_max() - mc.theta2)
    } else if mc.beta2 == 1.0 {
        // lam1 > 0 on the whole positive axis: immediate blow-up regime.
        (CaseTag::Case3, 0.0)
    } else {
        let root = u_star(model, fp, mc)?;
        let case = if (root - 1.0).abs() < CASE2_TOL {
            CaseTag::Case2
        } else if root > 1.0 {
            CaseTag::Case1
        } else {
            CaseTag::Case3
        };
        (case, root)
    };
    Ok(Classification { case, u_star: root, beta_bound })
}

/// Time grids of `(psi1, psi0)` with classification metadata. The grid
/// is the accepted adaptive mesh; values between mesh points are
/// recovered by re-integration in [`RiccatiSolution::eval`].
#[derive(Debug, Clone)]
pub struct RiccatiSolution {
    pub t_grid: Vec<f64>,
    pub psi1: Vec<f64>,
    pub psi0: Vec<f64>,
    pub case_tag: CaseTag,
    /// Blow-up time for Case 3 solutions (quadrature value).
    pub t_infinity: Option<f64>,
    pub u_star: f64,
    /// Case 3 only: the reported `psi0` endpoint is a truncated value of
    /// an integral that the theory does not guarantee to be finite.
    pub psi0_divergence_suspected: bool,
    model: LevyModel,
    mu_y: f64,
    alpha_y: f64,
    theta2: f64,
    beta2: f64,
    tol: f64,
}

impl RiccatiSolution {
    pub fn horizon(&self) -> f64 {
        *self.t_grid.last().expect("grid is never empty")
    }

    /// Whether this solution was produced for exactly these inputs.
    pub fn matches(&self, model: &LevyModel, fp: &FactorParams, mc: &MeasureChange) -> bool {
        self.model == *model
            && self.mu_y == fp.mu_y
            && self.alpha_y == fp.alpha_y
            && self.theta2 == mc.theta2
            && self.beta2 == mc.beta2
    }

    fn field(&self) -> impl Fn(&State2) -> Option<State2> + '_ {
        riccati_field(&self.model, self.mu_y, self.alpha_y, self.theta2, self.beta2)
    }

    /// Evaluate `(psi1, psi0)` at an arbitrary time inside the covered
    /// horizon. Off-mesh queries re-integrate from the nearest mesh
    /// point below `t` with the solution's own tolerance, so no
    /// interpolation error is introduced.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        if !(t >= 0.0) {
            return Err(Error::domain(format!("eval requires t >= 0, got {t}")));
        }
        if t > self.horizon() * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::domain(format!(
                "t = {t} beyond the solved horizon {}",
                self.horizon()
            )));
        }
        if self.case_tag == CaseTag::Case2 {
            let rate = self.mu_y + self.model.cumulant_diff(self.theta2, 1.0, 0)?;
            return Ok((1.0, rate * t));
        }
        let idx = match self.t_grid.binary_search_by(|probe| probe.total_cmp(&t)) {
            Ok(i) => return Ok((self.psi1[i], self.psi0[i])),
            Err(i) => i.saturating_sub(1),
        };
        let t0 = self.t_grid[idx];
        let y0 = [self.psi1[idx], self.psi0[idx]];
        let ctrl = Controls {
            rtol: self.tol,
            h_init: (t - t0).max(1e-6),
            ..Controls::default()
        };
        let steps = integrate_adaptive(&self.field(), t0, y0, t, &ctrl, |_, _| false)?;
        let last = steps.last().expect("at least the initial step");
        Ok((last.y[0], last.y[1]))
    }
}

fn riccati_field(
    model: &LevyModel,
    mu_y: f64,
    alpha_y: f64,
    theta2: f64,
    beta2: f64,
) -> impl Fn(&State2) -> Option<State2> + '_ {
    let k2 = model
        .cumulant(theta2, 2)
        .expect("theta2 validated before building the field");
    move |y: &State2| {
        let u = y[0];
        if u + theta2 >= model.theta_max() {
            return None;
        }
        let d0 = model.cumulant_diff(theta2, u, 0).ok()?;
        let d1 = model.cumulant_diff(theta2, u, 1).ok()?;
        Some([
            -alpha_y * u + alpha_y * beta2 / k2 * d1,
            mu_y * u + d0,
        ])
    }
}

/// Truncation level for a blowing-up `psi1`: just inside the domain
/// boundary, or where the point-mass exponent would overflow.
fn psi_stop(model: &LevyModel, theta2: f64) -> f64 {
    let boundary = model.theta_max() - theta2;
    if boundary.is_finite() {
        boundary * (1.0 - BLOWUP_GUARD)
    } else {
        match *model {
            LevyModel::Dirac { a } => 690.0 / a,
            _ => 690.0,
        }
    }
}

/// Where the stepper stops racing toward the boundary.
fn psi_reach(model: &LevyModel, theta2: f64) -> f64 {
    let boundary = model.theta_max() - theta2;
    if boundary.is_finite() {
        boundary * (1.0 - INTEGRATION_GUARD)
    } else {
        psi_stop(model, theta2)
    }
}

/// Residual time from `from_level` to the guard level, by quadrature of
/// the separated equation.
fn boundary_tail_time(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    from_level: f64,
) -> Result<f64> {
    let stop = psi_stop(model, mc.theta2);
    if stop <= from_level {
        return Ok(0.0);
    }
    let f = |u: f64| {
        levy_exponents(model, fp, mc, u)
            .map(|e| if e.lam1 > 0.0 { 1.0 / e.lam1 } else { 0.0 })
            .unwrap_or(0.0)
    };
    adaptive_simpson(f, from_level, stop, 1e-9, 1e-15)
}

/// Solve the Riccati system on `[0, horizon]`.
///
/// Case 3 parameters yield a solution only when the horizon stays below
/// the escape time of the truncation level; otherwise a `BlowUp` error
/// carries the measured escape time. The integrability condition
/// `theta2 + sup psi1 < theta_max` is checked after the fact.
pub fn solve_riccati(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    horizon: f64,
    tol: f64,
) -> Result<RiccatiSolution> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain("horizon must be finite and > 0"));
    }
    if !(tol > 0.0 && tol < 1e-2) {
        return Err(Error::domain("tol must lie in (0, 1e-2)"));
    }
    let cls = classify(model, fp, mc)?;

    let mut sol = RiccatiSolution {
        t_grid: vec![0.0],
        psi1: vec![1.0],
        psi0: vec![0.0],
        case_tag: cls.case,
        t_infinity: None,
        u_star: cls.u_star,
        psi0_divergence_suspected: false,
        model: *model,
        mu_y: fp.mu_y,
        alpha_y: fp.alpha_y,
        theta2: mc.theta2,
        beta2: mc.beta2,
        tol,
    };

    if cls.case == CaseTag::Case2 {
        let rate = fp.mu_y + model.cumulant_diff(mc.theta2, 1.0, 0)?;
        sol.t_grid.push(horizon);
        sol.psi1.push(1.0);
        sol.psi0.push(rate * horizon);
        return Ok(sol);
    }

    let reach_level = psi_reach(model, mc.theta2);
    let field = riccati_field(model, fp.mu_y, fp.alpha_y, mc.theta2, mc.beta2);
    let ctrl = Controls { rtol: tol, ..Controls::default() };
    let steps = integrate_adaptive(&field, 0.0, [1.0, 0.0], horizon, &ctrl, |_, y| {
        y[0] >= reach_level
    })?;

    if cls.case == CaseTag::Case3 {
        if let Some(t_reach) = escape_time(&steps, reach_level, &field) {
            let t_esc = t_reach + boundary_tail_time(model, fp, mc, reach_level)?;
            return Err(Error::BlowUp { t_infinity: t_esc, horizon });
        }
        sol.t_infinity = Some(blow_up_time(model, fp, mc)?);
        sol.psi0_divergence_suspected = true;
    }

    for s in steps.iter().skip(1) {
        sol.t_grid.push(s.t);
        sol.psi1.push(s.y[0]);
        sol.psi0.push(s.y[1]);
    }
    let max_psi1 = sol.psi1.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if mc.theta2 + max_psi1 >= model.theta_max() {
        return Err(Error::Numerical(format!(
            "integrability condition violated: theta2 + max psi1 = {} >= theta_max",
            mc.theta2 + max_psi1
        )));
    }
    Ok(sol)
}

/// Crossing time of `psi1` through `level`, refined by cubic Hermite
/// inversion on the step that crossed.
fn escape_time<F>(steps: &[Step], level: f64, field: &F) -> Option<f64>
where
    F: Fn(&State2) -> Option<State2>,
{
    let last = steps.last()?;
    if last.y[0] < level {
        return None;
    }
    let idx = steps.iter().position(|s| s.y[0] >= level)?;
    if idx == 0 {
        return Some(steps[0].t);
    }
    let (a, b) = (&steps[idx - 1], &steps[idx]);
    let h = b.t - a.t;
    let da = field(&a.y).map(|d| d[0]).unwrap_or(0.0);
    let db = field(&b.y).map(|d| d[0]).unwrap_or(f64::MAX);
    // Bisect the Hermite cubic for psi1 = level.
    let hermite = |s: f64| {
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * a.y[0]
            + (s3 - 2.0 * s2 + s) * h * da
            + (-2.0 * s3 + 3.0 * s2) * b.y[0]
            + (s3 - s2) * h * db.min(1e300)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if hermite(mid) >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(a.t + 0.5 * (lo + hi) * h)
}

/// Blow-up time of a Case 3 solution by quadrature of `1 / lam1` from 1
/// to the domain boundary.
///
/// For a finite boundary the integrand extends continuously by zero; for
/// the point-mass model (infinite boundary) the substitution
/// `v = e^{-a u}` maps the tail to a bounded interval with a finite
/// integrand limit `1 / (alpha_Y beta2)` at `v = 0`.
pub fn blow_up_time(model: &LevyModel, fp: &FactorParams, mc: &MeasureChange) -> Result<f64> {
    let cls = classify(model, fp, mc)?;
    if cls.case != CaseTag::Case3 {
        return Err(Error::WrongCase { expected: CaseTag::Case3, actual: cls.case });
    }
    let lam1 = |u: f64| {
        levy_exponents(model, fp, mc, u)
            .map(|e| e.lam1)
            .unwrap_or(f64::INFINITY)
    };
    let boundary = model.theta_max() - mc.theta2;
    if boundary.is_finite() {
        let f = |u: f64| {
            if u >= boundary {
                0.0
            } else {
                let v = lam1(u);
                if v.is_finite() && v > 0.0 {
                    1.0 / v
                } else {
                    0.0
                }
            }
        };
        adaptive_simpson(f, 1.0, boundary, 1e-9, 1e-13)
    } else {
        let a = match *model {
            LevyModel::Dirac { a } => a,
            // Only the point-mass model has an infinite boundary.
            _ => {
                return Err(Error::UnsupportedModel(
                    "infinite exponential-moment boundary outside the point-mass model".into(),
                ))
            }
        };
        let g = |v: f64| {
            if v <= 0.0 {
                return 1.0 / (fp.alpha_y * mc.beta2);
            }
            let u = -v.ln() / a;
            let l = lam1(u);
            if l.is_finite() && l > 0.0 {
                1.0 / (a * v * l)
            } else {
                0.0
            }
        };
        adaptive_simpson(g, 0.0, (-a).exp(), 1e-9, 1e-13)
    }
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

    fn mc(theta2: f64, beta2: f64) -> MeasureChange {
        MeasureChange::new(0.0, theta2, 0.0, beta2)
    }

    #[test]
    fn exponents_vanish_at_zero() {
        let e = levy_exponents(&cpe(), &fp(), &mc(0.3, 0.5), 0.0).unwrap();
        assert_eq!(e.lam0, 0.0);
        assert_eq!(e.lam1, 0.0);
    }

    #[test]
    fn exponents_esscher_is_linear_decay() {
        let e = levy_exponents(&cpe(), &fp(), &mc(0.3, 0.0), 0.7).unwrap();
        assert_relative_eq!(e.lam1, -0.3466 * 0.7, max_relative = 1e-14);
    }

    #[test]
    fn exponents_dirac_closed_form() {
        // For unit jumps lam1(u) = alpha_Y (-u + beta2 (e^u - 1)),
        // independent of theta2.
        let d = LevyModel::Dirac { a: 1.0 };
        for &theta2 in &[0.0, 0.4] {
            let e = levy_exponents(&d, &fp(), &mc(theta2, 0.3), 1.3).unwrap();
            let expect = 0.3466 * (-1.3 + 0.3 * f64::exp_m1(1.3));
            assert_relative_eq!(e.lam1, expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn exponents_reject_the_boundary() {
        assert!(levy_exponents(&cpe(), &fp(), &mc(0.5, 0.2), 1.5).is_err());
    }

    #[test]
    fn u_star_matches_the_closed_form_root() {
        // (lambda - theta2)/4 (4 - b - sqrt(b^2 + 8 b)) for the
        // exponential-jump model.
        let root = u_star(&cpe(), &fp(), &mc(0.0, 0.5)).unwrap();
        assert_abs_diff_eq!(root, 0.719223593596, epsilon = 1e-9);

        let root = u_star(&cpe(), &fp(), &mc(0.0, 1.0 / 3.0)).unwrap();
        assert_abs_diff_eq!(root, 1.0, epsilon = 1e-9);

        // Dirac with beta2 below 1/(e-1) has u_star > 1.
        let d = LevyModel::Dirac { a: 1.0 };
        let root = u_star(&d, &fp(), &mc(0.0, 0.5)).unwrap();
        assert!(root > 1.0);
    }

    #[test]
    fn u_star_sign_structure() {
        let m = mc(0.2, 0.4);
        let root = u_star(&cpe(), &fp(), &m).unwrap();
        let boundary = 2.0 - 0.2;
        for i in 1..40 {
            let u = boundary * i as f64 / 40.0;
            let lam1 = levy_exponents(&cpe(), &fp(), &m, u).unwrap().lam1;
            if u < root - 1e-10 {
                assert!(lam1 < 0.0, "lam1({u}) should be negative");
            } else if u > root + 1e-10 {
                assert!(lam1 > 0.0, "lam1({u}) should be positive");
            }
        }
    }

    #[test]
    fn u_star_rejects_degenerate_beta() {
        assert!(u_star(&cpe(), &fp(), &mc(0.0, 0.0)).is_err());
        assert!(u_star(&cpe(), &fp(), &mc(0.0, 1.0)).is_err());
    }

    #[test]
    fn classification_thresholds() {
        let c = classify(&cpe(), &fp(), &mc(0.0, 0.2)).unwrap();
        assert_eq!(c.case, CaseTag::Case1);
        assert_relative_eq!(c.beta_bound, 1.0 / 3.0, max_relative = 1e-12);

        let c = classify(&cpe(), &fp(), &mc(0.0, 1.0 / 3.0)).unwrap();
        assert_eq!(c.case, CaseTag::Case2);

        let c = classify(&cpe(), &fp(), &mc(0.0, 0.5)).unwrap();
        assert_eq!(c.case, CaseTag::Case3);
        assert_abs_diff_eq!(c.u_star, 0.719223593596, epsilon = 1e-9);

        let d = LevyModel::Dirac { a: 1.0 };
        let c = classify(&d, &fp(), &mc(0.0, 0.1)).unwrap();
        assert_relative_eq!(
            c.beta_bound,
            1.0 / f64::exp_m1(1.0),
            max_relative = 1e-13
        );
    }

    #[test]
    fn classification_respects_the_sufficient_bound() {
        for &theta2 in &[-0.5, 0.0, 0.3] {
            let bound = classify(&cpe(), &fp(), &mc(theta2, 0.1)).unwrap().beta_bound;
            for &frac in &[0.3, 0.7, 0.95] {
                let c = classify(&cpe(), &fp(), &mc(theta2, bound * frac)).unwrap();
                assert_eq!(c.case, CaseTag::Case1);
            }
        }
    }

    #[test]
    fn classification_requires_theta_max_above_one() {
        let heavy = LevyModel::CompoundPoissonExp { c: 0.4, lambda: 0.9 };
        assert!(matches!(
            classify(&heavy, &fp(), &mc(0.0, 0.2)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn esscher_solution_matches_the_exponential() {
        let sol = solve_riccati(&cpe(), &fp(), &mc(0.4, 0.0), 360.0, 1e-11).unwrap();
        assert_eq!(sol.case_tag, CaseTag::Case1);
        assert_eq!(sol.psi1[0], 1.0);
        assert_eq!(sol.psi0[0], 0.0);
        for &t in &[0.5, 2.0, 77.7, 360.0] {
            let (p1, _) = sol.eval(t).unwrap();
            assert_abs_diff_eq!(p1, (-0.3466 * t).exp(), epsilon = 1e-8);
        }
        // Two-day half-life of the spike factor.
        let (p1, _) = sol.eval(2.0).unwrap();
        assert_abs_diff_eq!(p1, 0.499973590977, epsilon = 1e-8);
    }

    #[test]
    fn case2_is_exactly_stationary() {
        let sol = solve_riccati(&cpe(), &fp(), &mc(0.0, 1.0 / 3.0), 100.0, 1e-10).unwrap();
        assert_eq!(sol.case_tag, CaseTag::Case2);
        let (p1, p0) = sol.eval(40.0).unwrap();
        assert_eq!(p1, 1.0);
        // psi0(t) = kappa(1) t = 0.2 t for these parameters.
        assert_relative_eq!(p0, 0.2 * 40.0, max_relative = 1e-12);
    }

    #[test]
    fn case1_monotonicity_and_bounds() {
        let sol = solve_riccati(&cpe(), &fp(), &mc(0.2, 0.2), 360.0, 1e-10).unwrap();
        assert_eq!(sol.case_tag, CaseTag::Case1);
        for w in sol.psi1.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-12), "psi1 must be nonincreasing");
        }
        for w in sol.psi0.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "psi0 must be nondecreasing");
        }
        assert!(sol.psi1.iter().all(|&p| p > 0.0 && p <= 1.0));
        // Comparison bound psi1 <= exp(lam1(1) t).
        let rate = levy_exponents(&cpe(), &fp(), &mc(0.2, 0.2), 1.0).unwrap().lam1;
        for (t, p) in sol.t_grid.iter().zip(&sol.psi1) {
            assert!(*p <= (rate * t).exp() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn case1_exponential_rate() {
        // The decay rate -alpha_Y (1 - beta2) is asymptotic; at finite t
        // the measured (1/t) log psi1 carries a ln(C)/t offset from the
        // transient. For unit point-mass jumps the offset at t = 200 is
        // 8.2e-4, inside the 1e-3 band.
        let d = LevyModel::Dirac { a: 1.0 };
        let sol = solve_riccati(&d, &fp(), &mc(0.2, 0.2), 220.0, 1e-10).unwrap();
        let (p1, _) = sol.eval(200.0).unwrap();
        let rate = (1.0 / 200.0) * p1.ln();
        assert_abs_diff_eq!(rate, -0.3466 * 0.8, epsilon = 1e-3);

        // For the exponential-jump model the transient constant is
        // larger (ln C = 0.5397): freeze the finite-time value instead.
        let sol = solve_riccati(&cpe(), &fp(), &mc(0.2, 0.2), 220.0, 1e-10).unwrap();
        let (p1, _) = sol.eval(200.0).unwrap();
        assert_abs_diff_eq!((1.0 / 200.0) * p1.ln(), -0.274581667037, epsilon = 1e-8);
    }

    #[test]
    fn comparison_monotonicity_in_beta2() {
        let lo = solve_riccati(&cpe(), &fp(), &mc(0.1, 0.1), 120.0, 1e-10).unwrap();
        let hi = solve_riccati(&cpe(), &fp(), &mc(0.1, 0.25), 120.0, 1e-10).unwrap();
        for i in 0..=120 {
            let t = i as f64;
            let a = lo.eval(t).unwrap().0;
            let b = hi.eval(t).unwrap().0;
            assert!(b >= a - 1e-9, "psi1 must be monotone in beta2 at t = {t}");
        }
    }

    #[test]
    fn case3_truncates_or_errors() {
        let m = mc(0.0, 0.9);
        // Horizon beyond the escape time: refuse with the measured time.
        let err = solve_riccati(&cpe(), &fp(), &m, 30.0, 1e-10).unwrap_err();
        let t_esc = match err {
            Error::BlowUp { t_infinity, .. } => t_infinity,
            other => panic!("expected BlowUp, got {other:?}"),
        };
        let t_quad = blow_up_time(&cpe(), &fp(), &m).unwrap();
        assert_relative_eq!(t_esc, t_quad, max_relative = 1e-4);
        assert_relative_eq!(t_quad, 0.4234150157, max_relative = 1e-6);

        // Horizon inside the maximal domain: a truncated solution.
        let sol = solve_riccati(&cpe(), &fp(), &m, 0.25, 1e-10).unwrap();
        assert_eq!(sol.case_tag, CaseTag::Case3);
        assert!(sol.psi0_divergence_suspected);
        assert!(sol.t_infinity.unwrap() > sol.horizon());
        for w in sol.psi1.windows(2) {
            assert!(w[1] >= w[0], "psi1 must increase in Case 3");
        }
    }

    #[test]
    fn dirac_blow_up_time_anchor() {
        // Point-mass jumps, beta2 = 1: t_infinity = int_1^inf du /
        // (alpha_Y (e^u - 1 - u)); frozen from quadrature.
        let d = LevyModel::Dirac { a: 1.0 };
        let t = blow_up_time(&d, &fp(), &mc(0.0, 1.0)).unwrap();
        assert_relative_eq!(t, 2.2478886515, max_relative = 1e-6);
    }

    #[test]
    fn blow_up_time_rejects_other_cases() {
        assert!(matches!(
            blow_up_time(&cpe(), &fp(), &mc(0.0, 0.2)),
            Err(Error::WrongCase { .. })
        ));
    }

    #[test]
    fn eval_outside_horizon_is_rejected() {
        let sol = solve_riccati(&cpe(), &fp(), &mc(0.2, 0.2), 10.0, 1e-10).unwrap();
        assert!(sol.eval(11.0).is_err());
        assert!(sol.eval(-1.0).is_err());
    }
}
