//! Embedded Runge-Kutta-Fehlberg 4(5) integration for small autonomous
//! systems.
//!
//! The fourth-order solution is propagated; the fifth-order companion
//! supplies the local error estimate. Error control is per component
//! against `atol_i + rtol * |y_i|`, which lets the spike-factor
//! component be tracked in purely relative terms across twenty orders of
//! magnitude of decay. The vector field returns `None` outside its
//! domain; such steps are rejected and retried with a smaller `h`, which
//! doubles as the blow-up guard.

use crate::error::Error;
use crate::Result;

const STAGES: usize = 6;

// Fehlberg tableau.
const A: [[f64; 5]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const B4: [f64; STAGES] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];
const B5: [f64; STAGES] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];

pub type State2 = [f64; 2];

/// One accepted adaptive step.
#[derive(Debug, Clone, Copy)]
pub struct Step {
    pub t: f64,
    pub y: State2,
}

/// Integration controls. `atol` is per component.
#[derive(Debug, Clone, Copy)]
pub struct Controls {
    pub rtol: f64,
    pub atol: State2,
    pub h_max: f64,
    pub h_init: f64,
    pub max_steps: usize,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            rtol: 1e-10,
            atol: [1e-300, 1e-12],
            h_max: 1.0,
            h_init: 1e-3,
            max_steps: 50_000_000,
        }
    }
}

fn stage_sum(y: &State2, k: &[State2; STAGES], h: f64, coeffs: &[f64]) -> State2 {
    let mut out = *y;
    for (i, &c) in coeffs.iter().enumerate() {
        if c != 0.0 {
            out[0] += h * c * k[i][0];
            out[1] += h * c * k[i][1];
        }
    }
    out
}

/// Attempt one RKF45 step of size `h`; returns the fourth-order solution
/// and its scaled error estimate, or `None` if the field left its domain.
fn try_step<F>(field: &F, y: &State2, h: f64, rtol: f64, atol: &State2) -> Option<(State2, f64)>
where
    F: Fn(&State2) -> Option<State2>,
{
    let mut k = [[0.0; 2]; STAGES];
    k[0] = field(y)?;
    for s in 1..STAGES {
        let ys = stage_sum(y, &k, h, &A[s][..s]);
        k[s] = field(&ys)?;
    }
    let y4 = stage_sum(y, &k, h, &B4);
    let y5 = stage_sum(y, &k, h, &B5);
    if !(y4[0].is_finite() && y4[1].is_finite()) {
        return None;
    }
    let mut err = 0.0f64;
    for i in 0..2 {
        let scale = atol[i] + rtol * y4[i].abs().max(y[i].abs());
        err = err.max((y5[i] - y4[i]).abs() / scale);
    }
    Some((y4, err))
}

/// Integrate `y' = field(y)` from `(t0, y0)` to `t_end`, recording every
/// accepted step. `stop` may end the integration early (used for blow-up
/// truncation); it receives each accepted `(t, y)`.
pub fn integrate_adaptive<F, S>(
    field: &F,
    t0: f64,
    y0: State2,
    t_end: f64,
    ctrl: &Controls,
    mut on_step: S,
) -> Result<Vec<Step>>
where
    F: Fn(&State2) -> Option<State2>,
    S: FnMut(f64, &State2) -> bool,
{
    let mut steps = vec![Step { t: t0, y: y0 }];
    if t_end <= t0 {
        return Ok(steps);
    }
    let mut t = t0;
    let mut y = y0;
    let mut h = ctrl.h_init.min(ctrl.h_max).min(t_end - t0);
    let mut n = 0usize;
    while t < t_end {
        n += 1;
        if n > ctrl.max_steps {
            return Err(Error::Numerical(format!(
                "adaptive integrator exceeded {} steps at t = {t}",
                ctrl.max_steps
            )));
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Numerical(format!(
                "adaptive integrator step size underflow at t = {t}"
            )));
        }
        let h_eff = h.min(t_end - t);
        match try_step(field, &y, h_eff, ctrl.rtol, &ctrl.atol) {
            Some((y_new, err)) if err <= 1.0 => {
                t += h_eff;
                y = y_new;
                steps.push(Step { t, y });
                let grow = if err > 0.0 {
                    (0.9 * err.powf(-0.2)).min(4.0)
                } else {
                    4.0
                };
                h = (h_eff * grow).min(ctrl.h_max);
                if on_step(t, &y) {
                    break;
                }
            }
            Some((_, err)) => {
                h = h_eff * (0.9 * err.powf(-0.2)).max(0.1);
            }
            None => {
                // Field undefined at a stage point: shrink hard.
                h = h_eff * 0.25;
            }
        }
    }
    Ok(steps)
}

/// Fixed-step integration propagating the fourth-order solution, for
/// convergence studies. The field must stay in its domain.
pub fn integrate_fixed<F>(field: &F, t0: f64, y0: State2, t_end: f64, n_steps: usize) -> Result<State2>
where
    F: Fn(&State2) -> Option<State2>,
{
    let h = (t_end - t0) / n_steps as f64;
    let mut y = y0;
    for _ in 0..n_steps {
        let mut k = [[0.0; 2]; STAGES];
        k[0] = field(&y).ok_or_else(|| Error::Numerical("field left its domain".into()))?;
        for s in 1..STAGES {
            let ys = stage_sum(&y, &k, h, &A[s][..s]);
            k[s] = field(&ys).ok_or_else(|| Error::Numerical("field left its domain".into()))?;
        }
        y = stage_sum(&y, &k, h, &B4);
    }
    Ok(y)
}
