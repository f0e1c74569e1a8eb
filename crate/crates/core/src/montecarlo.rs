//! Path simulation under both measures and estimator cross-checks.
//!
//! The base factor is sampled exactly from its Gaussian transition. The
//! spike factor is simulated by event-driven compound-Poisson sampling
//! under the historical measure, and by state-dependent thinning with a
//! per-step envelope under the pricing measure. Density processes of the
//! measure change are simulated to verify their martingale property.
//!
//! Reproducibility: each path draws from its own counter-based stream
//! (ChaCha8 seeded by the configuration seed with the path index as the
//! stream number), so results are bit-identical for a given seed and
//! configuration regardless of how paths are scheduled across workers.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;

use crate::curve::ModelKind;
use crate::error::Error;
use crate::levy::LevyModel;
use crate::measure::{q_dynamics, FactorParams, MeasureChange};
use crate::riccati::{classify, solve_riccati, CaseTag};
use crate::special::eta;
use crate::Result;

/// Simulation controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n_paths: usize,
    /// Step length in days for the thinning envelope and the Euler grid
    /// of the Brownian density.
    pub dt: f64,
    pub seed: u64,
    /// Terminal time in days.
    pub horizon: f64,
}

impl SimConfig {
    pub fn new(n_paths: usize, dt: f64, seed: u64, horizon: f64) -> Result<Self> {
        let cfg = SimConfig { n_paths, dt, seed, horizon };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::domain("n_paths must be >= 1"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::domain("dt must be > 0"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain("horizon must be > 0"));
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

impl McEstimate {
    /// Kahan-compensated mean and standard error; the reduction order is
    /// fixed by the sample order, independent of worker scheduling.
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mean = kahan_sum(samples.iter().copied()) / n as f64;
        let var = if n > 1 {
            kahan_sum(samples.iter().map(|&s| (s - mean) * (s - mean))) / (n - 1) as f64
        } else {
            0.0
        };
        McEstimate { mean, std_error: (var / n as f64).sqrt(), n }
    }

    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == target {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - target) / self.std_error
        }
    }
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn sample_paths<T, F>(cfg: &SimConfig, worker: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| worker(i, &mut path_rng(cfg.seed, i)))
        .collect()
}

// ---------------------------------------------------------------------
// Base factor: exact Gaussian transitions.
// ---------------------------------------------------------------------

/// Terminal value of an OU factor with the given parameters; exact in
/// distribution. A zero speed degenerates to drifted Brownian motion,
/// which the `eta` forms cover without a branch.
fn gaussian_ou_terminal(
    x0: f64,
    mu: f64,
    alpha: f64,
    sigma: f64,
    t: f64,
    rng: &mut ChaCha8Rng,
) -> f64 {
    let mean = x0 * (-alpha * t).exp() + mu * t * eta(alpha * t);
    let var = sigma * sigma * t * eta(2.0 * alpha * t);
    let z: f64 = StandardNormal.sample(rng);
    mean + var.sqrt() * z
}

/// Terminal samples of the base factor under the historical measure.
pub fn simulate_x_terminal_p(fp: &FactorParams, cfg: &SimConfig) -> Result<Vec<f64>> {
    fp.validate()?;
    cfg.validate()?;
    sample_paths(cfg, |_, rng| {
        Ok(gaussian_ou_terminal(
            fp.x0,
            fp.mu_x,
            fp.alpha_x,
            fp.sigma_x,
            cfg.horizon,
            rng,
        ))
    })
}

/// Terminal samples of the base factor under the pricing measure.
pub fn simulate_x_terminal_q(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    cfg: &SimConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    let q = q_dynamics(model, fp, mc)?;
    sample_paths(cfg, |_, rng| {
        Ok(gaussian_ou_terminal(
            q.x0,
            q.mu_x,
            q.alpha_x,
            q.sigma_x,
            cfg.horizon,
            rng,
        ))
    })
}

// ---------------------------------------------------------------------
// Spike factor.
// ---------------------------------------------------------------------

/// Deterministic decay of the spike factor between jumps.
fn decay(y: f64, mu_y: f64, alpha_y: f64, dt: f64) -> f64 {
    let level = mu_y / alpha_y;
    level + (y - level) * (-alpha_y * dt).exp()
}

/// Time integral of the spike factor over a jump-free interval.
fn decay_integral(y: f64, mu_y: f64, alpha_y: f64, dt: f64) -> f64 {
    let level = mu_y / alpha_y;
    level * dt + (y - level) * dt * eta(alpha_y * dt)
}

fn jump_size_p(model: &LevyModel, rng: &mut ChaCha8Rng) -> f64 {
    match *model {
        LevyModel::Dirac { a } => a,
        LevyModel::CompoundPoissonExp { lambda, .. } => {
            Exp::new(lambda).expect("lambda > 0").sample(rng)
        }
        LevyModel::TemperedStable { .. } => unreachable!("finite activity checked by callers"),
    }
}

struct YPath {
    terminal: f64,
    /// `int_0^T Y(s) ds`, exact between events.
    integral: f64,
    /// `(time, size, pre-jump level)` per jump, recorded on demand.
    jumps: Vec<(f64, f64, f64)>,
}

fn require_finite_activity(model: &LevyModel, what: &str) -> Result<()> {
    if !model.has_finite_activity() {
        return Err(Error::UnsupportedModel(format!(
            "{what} requires a finite-activity subordinator (tempered stable is excluded)"
        )));
    }
    Ok(())
}

/// Event-driven simulation of the spike factor under the historical
/// measure: homogeneous Poisson arrivals at the Lévy mass, exponential
/// or fixed jump sizes, exact decay in between.
fn simulate_y_path_p(
    model: &LevyModel,
    fp: &FactorParams,
    horizon: f64,
    rng: &mut ChaCha8Rng,
    record_jumps: bool,
) -> YPath {
    let rate = model.total_mass();
    let mut t = 0.0;
    let mut y = fp.y0;
    let mut integral = 0.0;
    let mut jumps = Vec::new();
    loop {
        let wait: f64 = Exp::new(rate).expect("rate > 0").sample(rng);
        if t + wait >= horizon {
            integral += decay_integral(y, fp.mu_y, fp.alpha_y, horizon - t);
            return YPath {
                terminal: decay(y, fp.mu_y, fp.alpha_y, horizon - t),
                integral,
                jumps,
            };
        }
        integral += decay_integral(y, fp.mu_y, fp.alpha_y, wait);
        let y_pre = decay(y, fp.mu_y, fp.alpha_y, wait);
        let z = jump_size_p(model, rng);
        t += wait;
        if record_jumps {
            jumps.push((t, z, y_pre));
        }
        y = y_pre + z;
    }
}

/// Terminal samples of the spike factor under the historical measure.
pub fn simulate_y_terminal_p(
    model: &LevyModel,
    fp: &FactorParams,
    cfg: &SimConfig,
) -> Result<Vec<f64>> {
    model.validate()?;
    fp.validate()?;
    cfg.validate()?;
    require_finite_activity(model, "simulate_y_terminal_p")?;
    sample_paths(cfg, |_, rng| {
        Ok(simulate_y_path_p(model, fp, cfg.horizon, rng, false).terminal)
    })
}

/// Jump intensity under the pricing measure at spike level `y`:
/// `int H(y, z) l(dz) = int e^{theta2 z} l(dz)
///  + (alpha_Y beta2 / kappa''(theta2)) kappa'(theta2) y`.
struct QJumpLaw {
    esscher_mass: f64,
    state_coef: f64,
    /// Mixture weight numerators for the exponential-jump model.
    theta2: f64,
}

impl QJumpLaw {
    fn new(model: &LevyModel, fp: &FactorParams, mc: &MeasureChange) -> Result<Self> {
        let esscher_mass = match *model {
            LevyModel::Dirac { a } => (mc.theta2 * a).exp(),
            LevyModel::CompoundPoissonExp { c, lambda } => c / (lambda - mc.theta2),
            LevyModel::TemperedStable { .. } => {
                return Err(Error::UnsupportedModel(
                    "thinning requires a finite-activity subordinator".into(),
                ))
            }
        };
        let k1 = model.cumulant(mc.theta2, 1)?;
        let k2 = model.cumulant(mc.theta2, 2)?;
        Ok(QJumpLaw {
            esscher_mass,
            state_coef: fp.alpha_y * mc.beta2 * k1 / k2,
            theta2: mc.theta2,
        })
    }

    fn rate(&self, y: f64) -> f64 {
        self.esscher_mass + self.state_coef * y
    }

    /// Draw a jump size from the density proportional to `H(y, z) l(z)`.
    /// For exponential jumps this is a mixture of an exponential and a
    /// Gamma(2) with the tilted rate; the point mass always jumps by `a`.
    fn sample_size(&self, model: &LevyModel, y: f64, rng: &mut ChaCha8Rng) -> f64 {
        match *model {
            LevyModel::Dirac { a } => a,
            LevyModel::CompoundPoissonExp { lambda, .. } => {
                let tilted = lambda - self.theta2;
                let p_exp = self.esscher_mass / self.rate(y);
                let e = Exp::new(tilted).expect("tilted rate > 0");
                if rng.gen::<f64>() < p_exp {
                    e.sample(rng)
                } else {
                    e.sample(rng) + e.sample(rng)
                }
            }
            LevyModel::TemperedStable { .. } => unreachable!(),
        }
    }
}

/// One spike path under the pricing measure by state-dependent thinning.
///
/// Between events the spike level only decays toward `mu_Y / alpha_Y`,
/// so `max(current level, stationary level)` dominates the level (and
/// hence the jump intensity) until the next accepted jump or the next
/// envelope refresh, whichever comes first. Refreshes happen at least
/// every `dt` days. The envelope check cannot fail for this dynamics; it
/// is kept as a guard and any violation surfaces as an error rather than
/// a biased path.
fn simulate_y_path_q(
    model: &LevyModel,
    fp: &FactorParams,
    law: &QJumpLaw,
    horizon: f64,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut t = 0.0;
    let mut y = fp.y0;
    let stationary = fp.mu_y / fp.alpha_y;
    loop {
        let envelope = y.max(stationary);
        let lam_bar = law.rate(envelope);
        let wait: f64 = Exp::new(lam_bar).expect("rate > 0").sample(rng);
        let step = wait.min(dt).min(horizon - t);
        if t + step >= horizon {
            return Ok(decay(y, fp.mu_y, fp.alpha_y, horizon - t));
        }
        let y_new = decay(y, fp.mu_y, fp.alpha_y, step);
        t += step;
        if wait > step {
            // Envelope refresh without a candidate arrival.
            y = y_new;
            continue;
        }
        if y_new > envelope * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::EnvelopeViolation { t, y: y_new, envelope });
        }
        y = if rng.gen::<f64>() < law.rate(y_new) / lam_bar {
            y_new + law.sample_size(model, y_new, rng)
        } else {
            y_new
        };
    }
}

/// Terminal samples of the spike factor under the pricing measure.
///
/// An envelope violation (unreachable for the monotone decay dynamics,
/// but guarded) is retried on a fresh substream with a halved step
/// before being propagated.
pub fn simulate_y_terminal_q(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    cfg: &SimConfig,
) -> Result<Vec<f64>> {
    model.validate()?;
    fp.validate()?;
    cfg.validate()?;
    mc.validate_arithmetic(model)?;
    require_finite_activity(model, "simulate_y_terminal_q")?;
    let law = QJumpLaw::new(model, fp, mc)?;
    sample_paths(cfg, |i, rng| {
        let mut dt = cfg.dt;
        match simulate_y_path_q(model, fp, &law, cfg.horizon, dt, rng) {
            Ok(v) => Ok(v),
            Err(Error::EnvelopeViolation { .. }) => {
                let mut last = Err(Error::domain("unreachable"));
                for attempt in 1..=4u64 {
                    dt *= 0.5;
                    let mut retry_rng = path_rng(cfg.seed, i + (attempt << 33));
                    last = simulate_y_path_q(model, fp, &law, cfg.horizon, dt, &mut retry_rng);
                    if last.is_ok() {
                        break;
                    }
                }
                last
            }
            Err(e) => Err(e),
        }
    })
}

// ---------------------------------------------------------------------
// Density processes of the measure change.
// ---------------------------------------------------------------------

/// Monte Carlo means of the two density processes at the horizon; both
/// must be statistically indistinguishable from one when the change of
/// measure is a true probability change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityCheck {
    pub mean_g: McEstimate,
    pub mean_h: McEstimate,
}

/// Simulate the stochastic exponentials of the Brownian and jump
/// kernels under the historical measure.
///
/// The Brownian density uses an Euler grid of step `cfg.dt` for the
/// stochastic integral (the kernel is affine in the simulated factor);
/// the jump density is exact: a product over jumps times the
/// closed-form compensator integral, which is affine in `int Y ds`.
pub fn density_martingale_check(
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    cfg: &SimConfig,
) -> Result<DensityCheck> {
    model.validate()?;
    fp.validate()?;
    cfg.validate()?;
    mc.validate_arithmetic(model)?;
    require_finite_activity(model, "density_martingale_check")?;
    if cfg.horizon > 90.0 {
        return Err(Error::domain(
            "density_martingale_check requires horizon <= 90 days (variance control)",
        ));
    }
    let k0 = model.cumulant(mc.theta2, 0)?;
    let k1 = model.cumulant(mc.theta2, 1)?;
    let k2 = model.cumulant(mc.theta2, 2)?;
    let n_steps = (cfg.horizon / cfg.dt).ceil().max(1.0) as usize;
    let h = cfg.horizon / n_steps as f64;
    let sqrt_h = h.sqrt();

    let samples = sample_paths(cfg, |_, rng| {
        // Brownian part: Euler for X and for the stochastic integral,
        // driven by the same increments.
        let mut x = fp.x0;
        let mut int_g_dw = 0.0;
        let mut int_g2_dt = 0.0;
        for _ in 0..n_steps {
            let g = (mc.theta1 + fp.alpha_x * mc.beta1 * x) / fp.sigma_x;
            let z: f64 = StandardNormal.sample(rng);
            let dw = sqrt_h * z;
            int_g_dw += g * dw;
            int_g2_dt += g * g * h;
            x += (fp.mu_x - fp.alpha_x * x) * h + fp.sigma_x * dw;
        }
        let density_g = (int_g_dw - 0.5 * int_g2_dt).exp();

        // Jump part: exact path, product formula.
        let path = simulate_y_path_p(model, fp, cfg.horizon, rng, true);
        let mut log_prod = 0.0;
        for &(_, z, y_pre) in &path.jumps {
            let kernel = (mc.theta2 * z).exp() * (1.0 + fp.alpha_y * mc.beta2 * z * y_pre / k2);
            log_prod += kernel.ln();
        }
        let compensator = k0 * cfg.horizon + fp.alpha_y * mc.beta2 * k1 / k2 * path.integral;
        let density_h = (log_prod - compensator).exp();
        Ok((density_g, density_h))
    })?;

    let g: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let hh: Vec<f64> = samples.iter().map(|s| s.1).collect();
    Ok(DensityCheck {
        mean_g: McEstimate::from_samples(&g),
        mean_h: McEstimate::from_samples(&hh),
    })
}

// ---------------------------------------------------------------------
// Forward estimation by direct simulation under the pricing measure.
// ---------------------------------------------------------------------

/// Monte Carlo estimate of the forward price `F_Q(0, T)` by direct
/// simulation of both factors under the pricing measure. Serves as the
/// oracle against the closed-form and exp-affine pricers.
pub fn mc_forward(
    kind: ModelKind,
    model: &LevyModel,
    fp: &FactorParams,
    mc: &MeasureChange,
    cfg: &SimConfig,
    maturity: f64,
) -> Result<McEstimate> {
    model.validate()?;
    fp.validate()?;
    cfg.validate()?;
    require_finite_activity(model, "mc_forward")?;
    if maturity != cfg.horizon {
        return Err(Error::domain("mc_forward requires maturity == cfg.horizon"));
    }
    match kind {
        ModelKind::Arithmetic => mc.validate_arithmetic(model)?,
        ModelKind::Geometric => {
            mc.validate_geometric(model)?;
            fp.seasonality.validate_positive()?;
            let cls = classify(model, fp, mc)?;
            if cls.case == CaseTag::Case3 {
                return Err(Error::BlowUp {
                    t_infinity: solve_riccati(model, fp, mc, maturity, 1e-10)
                        .err()
                        .and_then(|e| match e {
                            Error::BlowUp { t_infinity, .. } => Some(t_infinity),
                            _ => None,
                        })
                        .unwrap_or(f64::NAN),
                    horizon: maturity,
                });
            }
        }
    }
    let q = q_dynamics(model, fp, mc)?;
    let law = QJumpLaw::new(model, fp, mc)?;
    let season = fp.seasonality.eval(maturity);
    let samples = sample_paths(cfg, |_, rng| {
        let x = gaussian_ou_terminal(q.x0, q.mu_x, q.alpha_x, q.sigma_x, cfg.horizon, rng);
        let y = simulate_y_path_q(model, fp, &law, cfg.horizon, cfg.dt, rng)?;
        Ok(match kind {
            ModelKind::Arithmetic => season + x + y,
            ModelKind::Geometric => season * (x + y).exp(),
        })
    })?;
    Ok(McEstimate::from_samples(&samples))
}
