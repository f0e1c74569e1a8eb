//! Property tests for the algebraic invariants of the pricing formulas.

use proptest::prelude::*;

use premia_core::arithmetic::{
    self, expected_spot, forward_price, lambda_fn, risk_premium, MarketState,
};
use premia_core::measure::{jump_kernel, FactorParams, MeasureChange, Seasonality};
use premia_core::special::eta;
use premia_core::LevyModel;

fn factors(seasonality: Seasonality) -> FactorParams {
    FactorParams {
        mu_x: 0.0,
        alpha_x: 0.099,
        sigma_x: 0.0158,
        x0: 0.0,
        mu_y: 0.0,
        alpha_y: 0.3466,
        y0: 0.0,
        seasonality,
    }
}

fn cpe() -> LevyModel {
    LevyModel::CompoundPoissonExp { c: 0.4, lambda: 2.0 }
}

proptest! {
    #[test]
    fn premium_equals_forward_minus_expected(
        x in -5.0..5.0f64,
        y in 0.0..5.0f64,
        theta1 in -0.5..0.5f64,
        theta2 in -1.0..0.99f64,
        beta1 in 0.0..=1.0f64,
        beta2 in 0.0..=1.0f64,
        tau in 0.0..400.0f64,
    ) {
        let fp = factors(Seasonality::Constant { level: 30.0 });
        let mc = MeasureChange::new(theta1, theta2, beta1, beta2);
        let state = MarketState::new(0.0, x, y).unwrap();
        let rp = risk_premium(&cpe(), &fp, &mc, &state, tau).unwrap();
        let diff = forward_price(&cpe(), &fp, &mc, &state, tau).unwrap()
            - expected_spot(&cpe(), &fp, &state, tau).unwrap();
        // The closed form avoids the seasonality entirely; the direct
        // difference carries its rounding.
        prop_assert!((rp - diff).abs() <= 1e-11);
    }

    #[test]
    fn premium_ignores_the_seasonality(
        level in -100.0..100.0f64,
        amplitude in 0.0..50.0f64,
        phase in 0.0..6.28f64,
        theta1 in -0.5..0.5f64,
        beta2 in 0.0..0.99f64,
        tau in 0.0..400.0f64,
    ) {
        let state = MarketState::new(0.0, 1.0, 1.0).unwrap();
        let mc = MeasureChange::new(theta1, 0.3, 0.0, beta2);
        let plain = risk_premium(
            &cpe(),
            &factors(Seasonality::Constant { level: 0.0 }),
            &mc,
            &state,
            tau,
        )
        .unwrap();
        let seasonal = risk_premium(
            &cpe(),
            &factors(Seasonality::Trig { level, amplitude, period_days: 365.0, phase }),
            &mc,
            &state,
            tau,
        )
        .unwrap();
        prop_assert_eq!(plain, seasonal);
    }

    #[test]
    fn esscher_premium_is_state_independent(
        x in -5.0..5.0f64,
        y in 0.0..5.0f64,
        theta1 in -0.5..0.5f64,
        theta2 in -1.0..0.99f64,
        tau in 0.0..400.0f64,
    ) {
        // beta = 0 reduces to the additive Esscher premium, which does
        // not depend on the observed state.
        let fp = factors(Seasonality::Constant { level: 0.0 });
        let mc = MeasureChange::new(theta1, theta2, 0.0, 0.0);
        let at_state = risk_premium(
            &cpe(), &fp, &mc, &MarketState::new(0.0, x, y).unwrap(), tau,
        ).unwrap();
        let at_origin = risk_premium(
            &cpe(), &fp, &mc, &MarketState::new(0.0, 0.0, 0.0).unwrap(), tau,
        ).unwrap();
        prop_assert_eq!(at_state, at_origin);
        let k1 = |t: f64| cpe().cumulant(t, 1).unwrap();
        let esscher = theta1 / 0.099 * (1.0 - (-0.099f64 * tau).exp())
            + (k1(theta2) - k1(0.0)) / 0.3466 * (1.0 - (-0.3466f64 * tau).exp());
        prop_assert!((at_state - esscher).abs() <= 1e-12);
    }

    #[test]
    fn lambda_fn_is_nonnegative_and_vanishes_at_one(
        x in 0.0..500.0f64,
        y in 0.0..=1.0f64,
    ) {
        // Nonnegative up to rounding dust for y adversarially close to 1,
        // where the true value sits below the representable resolution.
        let v = lambda_fn(x, y).unwrap();
        prop_assert!(v >= -5e-16 * (1.0 + x));
        prop_assert_eq!(lambda_fn(x, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn jump_kernel_dominates_the_esscher_tilt(
        theta2 in -1.0..0.99f64,
        beta2 in 0.0..=1.0f64,
        y in 0.0..10.0f64,
        z in 0.001..10.0f64,
    ) {
        let fp = factors(Seasonality::Constant { level: 0.0 });
        let mc = MeasureChange::new(0.0, theta2, 0.0, beta2);
        let h = jump_kernel(&cpe(), &fp, &mc, y, z).unwrap();
        prop_assert!(h > 0.0);
        prop_assert!(h >= (theta2 * z).exp() * (1.0 - 1e-14));
    }

    #[test]
    fn eta_is_positive_decreasing_on_the_positive_axis(
        a in 0.0001..50.0f64,
        b in 0.0001..50.0f64,
    ) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(eta(hi) > 0.0);
        prop_assert!(eta(lo) >= eta(hi));
        prop_assert!(eta(lo) <= 1.0);
    }

    #[test]
    fn swap_premium_lies_between_curve_extremes(
        theta1 in -0.3..0.3f64,
        beta2 in 0.0..0.9f64,
        t1 in 1.0..100.0f64,
        width in 0.5..60.0f64,
    ) {
        let fp = factors(Seasonality::Constant { level: 0.0 });
        let mc = MeasureChange::new(theta1, 0.5, 0.0, beta2);
        let state = MarketState::new(0.0, 0.5, 0.5).unwrap();
        let t2 = t1 + width;
        let swap = arithmetic::swap_risk_premium(&cpe(), &fp, &mc, &state, t1, t2).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=200 {
            let t = t1 + width * i as f64 / 200.0;
            let v = risk_premium(&cpe(), &fp, &mc, &state, t).unwrap();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        prop_assert!(swap >= lo - 1e-9 && swap <= hi + 1e-9);
    }
}
