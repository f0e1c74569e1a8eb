//! Adaptive quadrature used by the pricing formulas and test oracles.

use crate::error::Error;
use crate::Result;

/// Adaptive Simpson integration of `f` over `[a, b]`.
///
/// The interval is first split into sixteen uniform panels so that
/// integrands concentrated in a small part of a long interval cannot be
/// mistaken for zero by the initial coarse samples; each panel is then
/// refined recursively until its Richardson error estimate is below its
/// share of the mixed tolerance `abs_tol + rel_tol * |integral|`.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("adaptive_simpson requires finite bounds"));
    }
    if a == b {
        return Ok(0.0);
    }
    const PANELS: usize = 16;
    let h = (b - a) / PANELS as f64;
    let nodes: Vec<f64> = (0..=2 * PANELS)
        .map(|i| a + 0.5 * h * i as f64)
        .collect();
    let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
    let mut magnitude = 0.0;
    let mut estimates = [0.0; PANELS];
    for p in 0..PANELS {
        let (fa, fm, fb) = (values[2 * p], values[2 * p + 1], values[2 * p + 2]);
        estimates[p] = simpson(nodes[2 * p], nodes[2 * p + 2], fa, fm, fb);
        magnitude += estimates[p].abs();
    }
    let scale = magnitude.max(abs_tol / rel_tol.max(1e-300));
    let tol = abs_tol.max(rel_tol * scale) / PANELS as f64;
    let mut evals = 0usize;
    let mut total = 0.0;
    for p in 0..PANELS {
        total += recurse(
            &f,
            nodes[2 * p],
            nodes[2 * p + 2],
            values[2 * p],
            values[2 * p + 1],
            values[2 * p + 2],
            estimates[p],
            tol,
            50,
            &mut evals,
        )?;
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    if *evals > 20_000_000 {
        return Err(Error::Numerical(
            "adaptive_simpson exceeded its evaluation budget".into(),
        ));
    }
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 {
        return Err(Error::Numerical(format!(
            "adaptive_simpson failed to converge on [{a}, {b}]"
        )));
    }
    if delta.abs() <= 15.0 * tol || (b - a).abs() < 1e-14 * (a.abs() + b.abs()).max(1.0) {
        return Ok(left + right + delta / 15.0);
    }
    let lv = recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals)?;
    let rv = recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals)?;
    Ok(lv + rv)
}

/// Integral of `f` over `(0, infinity)` via the substitution `z = -ln v`,
/// which maps the half line to `(0, 1)`: the integrand must decay at
/// least exponentially. `f` is evaluated as given; the Jacobian `1/v` is
/// applied internally.
pub fn integrate_half_line<F>(f: F, rel_tol: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let g = |v: f64| {
        if v <= 0.0 || v >= 1.0 {
            0.0
        } else {
            f(-v.ln()) / v
        }
    };
    adaptive_simpson(g, 0.0, 1.0, rel_tol, abs_tol)
}
