//! Two-factor Ornstein-Uhlenbeck spot model for power markets under a
//! structure-preserving change of pricing measure.
//!
//! The spot has a Brownian base factor and a subordinator-driven spike
//! factor. The pricing measure rescales both the level and the speed of
//! mean reversion of each factor, extending the classical Esscher
//! transform. This crate exposes:
//!
//! - [`levy`]: subordinator models (point mass, compound Poisson with
//!   exponential jumps, tempered stable) with cumulants and admissible
//!   parameter domains,
//! - [`measure`]: the measure-change kernels and the transformed factor
//!   dynamics,
//! - [`arithmetic`]: closed-form forwards, swaps and risk premia for the
//!   arithmetic spot model,
//! - [`riccati`]: the generalized Riccati system for the spike factor,
//!   its classification and blow-up analysis,
//! - [`geometric`]: exp-affine forwards and risk premia for the geometric
//!   spot model,
//! - [`montecarlo`]: exact path simulation under both measures, density
//!   martingale checks and estimator cross-validation.
//!
//! Time is measured in days throughout.

pub mod arithmetic;
pub mod curve;
pub mod error;
pub mod geometric;
pub mod levy;
pub mod measure;
pub mod montecarlo;
pub mod quad;
pub mod riccati;
pub mod rk;
pub mod special;

pub use arithmetic::MarketState;
pub use curve::{CurveMeta, CurveResult, Method, ModelKind};
pub use error::Error;
pub use levy::{LevyDensity, LevyModel, ThetaDomains};
pub use measure::{FactorParams, FactorParamsQ, MeasureChange, Seasonality};
pub use montecarlo::{McEstimate, SimConfig};
pub use riccati::{CaseTag, Classification, RiccatiSolution};

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
