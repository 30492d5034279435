//! Hazard-rate change-point model with partial information: simulation,
//! filtering, closed-form survival and pricing, and Monte Carlo checks.

pub mod analytics;
pub mod error;
pub mod filters;
pub mod format;
pub mod harness;
pub mod model;
pub mod montecarlo;
pub mod params;
pub mod pricing;
pub mod quadrature;
pub mod rng;

pub use error::{Error, Result};
pub use params::{ModelParams, Preset};
