//! Scenario JSON schema and the built-in figure setups.

use premia_core::{FactorParams, LevyModel, MarketState, MeasureChange, Seasonality};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LevySpec {
    Dirac { a: f64 },
    Cpexp { c: f64, lambda: f64 },
    TemperedStable { c: f64, lambda: f64, alpha: f64 },
}

impl From<&LevySpec> for LevyModel {
    fn from(spec: &LevySpec) -> Self {
        match *spec {
            LevySpec::Dirac { a } => LevyModel::Dirac { a },
            LevySpec::Cpexp { c, lambda } => LevyModel::CompoundPoissonExp { c, lambda },
            LevySpec::TemperedStable { c, lambda, alpha } => {
                LevyModel::TemperedStable { c, lambda, alpha }
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SeasonalitySpec {
    Constant {
        level: f64,
    },
    Trig {
        level: f64,
        amplitude: f64,
        period_days: f64,
        phase: f64,
    },
}

impl From<&SeasonalitySpec> for Seasonality {
    fn from(spec: &SeasonalitySpec) -> Self {
        match *spec {
            SeasonalitySpec::Constant { level } => Seasonality::Constant { level },
            SeasonalitySpec::Trig { level, amplitude, period_days, phase } => {
                Seasonality::Trig { level, amplitude, period_days, phase }
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct FactorsSpec {
    pub mu_x: f64,
    pub alpha_x: f64,
    pub sigma_x: f64,
    pub x0: f64,
    pub mu_y: f64,
    pub alpha_y: f64,
    pub y0: f64,
    pub seasonality: SeasonalitySpec,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MeasureSpec {
    pub theta: [f64; 2],
    pub beta: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
pub struct StateSpec {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GridSpec {
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct OutputsSpec {
    pub csv_path: Option<String>,
    pub svg_path: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Scenario {
    pub levy: LevySpec,
    pub factors: FactorsSpec,
    #[serde(default = "default_measure")]
    pub measure: MeasureSpec,
    #[serde(default = "default_state")]
    pub state: StateSpec,
    #[serde(default = "default_grid")]
    pub grid: GridSpec,
    #[serde(default)]
    pub outputs: OutputsSpec,
}

fn default_measure() -> MeasureSpec {
    MeasureSpec { theta: [0.0, 0.0], beta: [0.0, 0.0] }
}

fn default_state() -> StateSpec {
    StateSpec { t: 0.0, x: 0.0, y: 0.0 }
}

fn default_grid() -> GridSpec {
    GridSpec { tau_min: 0.0, tau_max: 360.0, n_points: 361 }
}

impl Scenario {
    pub fn model(&self) -> LevyModel {
        (&self.levy).into()
    }

    pub fn factor_params(&self) -> FactorParams {
        FactorParams {
            mu_x: self.factors.mu_x,
            alpha_x: self.factors.alpha_x,
            sigma_x: self.factors.sigma_x,
            x0: self.factors.x0,
            mu_y: self.factors.mu_y,
            alpha_y: self.factors.alpha_y,
            y0: self.factors.y0,
            seasonality: (&self.factors.seasonality).into(),
        }
    }

    pub fn measure_change(&self) -> MeasureChange {
        MeasureChange::new(
            self.measure.theta[0],
            self.measure.theta[1],
            self.measure.beta[0],
            self.measure.beta[1],
        )
    }

    pub fn market_state(&self) -> Result<MarketState, premia_core::Error> {
        MarketState::new(self.state.t, self.state.x, self.state.y)
    }

    pub fn taus(&self) -> Vec<f64> {
        premia_core::curve::linspace(
            self.grid.tau_min,
            self.grid.tau_max,
            self.grid.n_points.max(2),
        )
    }
}

/// The default scenario: the reference parameter block with exponential
/// jumps (half-lives of seven and two days, five spikes a month of mean
/// one half) and the identity measure change.
pub fn default_scenario() -> Scenario {
    serde_json::from_str(DEFAULT_SCENARIO_JSON).expect("built-in scenario parses")
}

pub const DEFAULT_SCENARIO_JSON: &str = r#"{
  "levy": {"type": "cpexp", "c": 0.4, "lambda": 2.0},
  "factors": {
    "mu_x": 0.0, "alpha_x": 0.099, "sigma_x": 0.0158, "x0": 0.0,
    "mu_y": 0.0, "alpha_y": 0.3466, "y0": 0.0,
    "seasonality": {"kind": "constant", "level": 0.0}
  },
  "measure": {"theta": [0.0, 0.0], "beta": [0.0, 0.0]},
  "state": {"t": 0.0, "x": 0.0, "y": 0.0},
  "grid": {"tau_min": 0.0, "tau_max": 360.0, "n_points": 361}
}"#;

/// Built-in figure scenarios. Each entry is
/// `(id, model kind, theta1, theta2, beta1, beta2, x, y)` over the
/// reference parameter block.
pub struct Figure {
    pub id: &'static str,
    pub geometric: bool,
    pub theta: [f64; 2],
    pub beta: [f64; 2],
    pub x: f64,
    pub y: f64,
}

pub const FIGURES: &[Figure] = &[
    // Arithmetic, pure level change (Esscher).
    Figure { id: "beta0-1a", geometric: false, theta: [0.075, 0.0], beta: [0.0, 0.0], x: 0.0, y: 0.0 },
    Figure { id: "beta0-1b", geometric: false, theta: [-0.075, 0.0], beta: [0.0, 0.0], x: 0.0, y: 0.0 },
    Figure { id: "beta0-1c", geometric: false, theta: [0.0, 0.75], beta: [0.0, 0.0], x: 0.0, y: 0.0 },
    Figure { id: "beta0-1d", geometric: false, theta: [0.0, -0.75], beta: [0.0, 0.0], x: 0.0, y: 0.0 },
    Figure { id: "beta0-2a", geometric: false, theta: [-0.1, 0.95], beta: [0.0, 0.0], x: 0.0, y: 0.0 },
    Figure { id: "beta0-2b", geometric: false, theta: [0.02, -0.95], beta: [0.0, 0.0], x: 0.0, y: 0.0 },
    Figure { id: "beta0-2c", geometric: false, theta: [-0.05, 0.95], beta: [0.0, 0.0], x: 0.0, y: 0.0 },
    Figure { id: "beta0-2d", geometric: false, theta: [-0.075, 0.15], beta: [0.0, 0.0], x: 0.0, y: 0.0 },
    // Arithmetic, pure speed change.
    Figure { id: "theta0-3a", geometric: false, theta: [0.0, 0.0], beta: [0.25, 0.75], x: 2.5, y: 2.5 },
    Figure { id: "theta0-3b", geometric: false, theta: [0.0, 0.0], beta: [0.75, 0.0], x: -2.5, y: 2.5 },
    Figure { id: "theta0-3c", geometric: false, theta: [0.0, 0.0], beta: [0.75, 0.75], x: -2.5, y: 0.0 },
    Figure { id: "theta0-3d", geometric: false, theta: [0.0, 0.0], beta: [0.5, 0.5], x: -2.5, y: 2.5 },
    // Arithmetic, level and speed together.
    Figure { id: "fig4", geometric: false, theta: [-0.5, 0.5], beta: [0.0, 0.88], x: 0.0, y: 5.0 },
    // Geometric, pure level change.
    Figure { id: "beta0-5a", geometric: true, theta: [-0.3, 0.9], beta: [0.0, 0.0], x: -0.5, y: 0.5 },
    Figure { id: "beta0-5b", geometric: true, theta: [0.03, -0.9], beta: [0.0, 0.0], x: 0.5, y: 0.5 },
    Figure { id: "beta0-5c", geometric: true, theta: [-0.09, 0.9], beta: [0.0, 0.0], x: -0.5, y: 0.5 },
    Figure { id: "beta0-5d", geometric: true, theta: [-0.2, 0.1], beta: [0.0, 0.0], x: 0.5, y: 0.5 },
    // Geometric, pure speed change.
    Figure { id: "theta0-6a", geometric: true, theta: [0.0, 0.0], beta: [0.4, 0.2], x: 1.0, y: 0.5 },
    Figure { id: "theta0-6b", geometric: true, theta: [0.0, 0.0], beta: [0.75, 0.0], x: -2.5, y: 0.5 },
    Figure { id: "theta0-6c", geometric: true, theta: [0.0, 0.0], beta: [0.75, 0.3], x: -2.5, y: 0.0 },
    Figure { id: "theta0-6d", geometric: true, theta: [0.0, 0.0], beta: [0.5, 0.2], x: -2.5, y: 2.5 },
    // Geometric, level and speed together.
    Figure { id: "fig7", geometric: true, theta: [-0.1, 0.2], beta: [0.0, 0.2], x: 1.0, y: 1.0 },
];

/// Scenario for a built-in figure, over the reference parameter block.
pub fn figure_scenario(fig: &Figure) -> Scenario {
    let mut scenario = default_scenario();
    if fig.geometric {
        scenario.factors.seasonality = SeasonalitySpec::Constant { level: 1.0 };
    }
    scenario.measure = MeasureSpec { theta: fig.theta, beta: fig.beta };
    scenario.state = StateSpec { t: 0.0, x: fig.x, y: fig.y };
    scenario
}

pub fn find_figure(id: &str) -> Option<&'static Figure> {
    FIGURES.iter().find(|f| f.id == id)
}
