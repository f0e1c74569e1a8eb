//! Sampled curves over times-to-maturity with provenance metadata.

use crate::error::Error;
use crate::measure::MeasureChange;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Arithmetic,
    Geometric,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Arithmetic => write!(f, "arith"),
            ModelKind::Geometric => write!(f, "geom"),
        }
    }
}

/// How the values of a curve were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Ode,
    MonteCarlo,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::ClosedForm => write!(f, "closed_form"),
            Method::Ode => write!(f, "ode"),
            Method::MonteCarlo => write!(f, "monte_carlo"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveMeta {
    pub model: ModelKind,
    pub measure: MeasureChange,
    pub method: Method,
    /// Standard errors per point, present only for Monte Carlo curves.
    pub standard_errors: Option<Vec<f64>>,
}

/// A sampled curve (forward price or risk premium) over strictly
/// increasing times-to-maturity.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveResult {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub meta: CurveMeta,
}

impl CurveResult {
    pub fn new(taus: Vec<f64>, values: Vec<f64>, meta: CurveMeta) -> Result<Self> {
        if taus.len() != values.len() {
            return Err(Error::domain("curve taus and values must have equal length"));
        }
        if taus.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::domain("curve taus must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("curve values must be finite"));
        }
        if let Some(se) = &meta.standard_errors {
            if se.len() != values.len() {
                return Err(Error::domain("standard_errors length mismatch"));
            }
        }
        Ok(Self { taus, values, meta })
    }

    /// Number of strict sign changes along the curve; values with
    /// magnitude below `tol` are treated as zero and skipped.
    pub fn sign_changes(&self, tol: f64) -> usize {
        let mut changes = 0;
        let mut prev: Option<f64> = None;
        for &v in &self.values {
            if v.abs() <= tol {
                continue;
            }
            if let Some(p) = prev {
                if p * v < 0.0 {
                    changes += 1;
                }
            }
            prev = Some(v);
        }
        changes
    }
}

/// Uniform grid of `n` points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least two points");
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}
