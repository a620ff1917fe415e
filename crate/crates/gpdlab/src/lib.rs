//! Generalized Pareto distribution (GPD) shape estimation and estimator
//! normality testing.
//!
//! The crate has three layers:
//!
//! - a numeric core, generic over the scalar type ([`scalar::Real`]):
//!   the GPD probability model ([`gpd`]), the PWM / profile-ML /
//!   Zhang–Stephens shape estimators with bootstrap standard errors
//!   ([`estimators`]), and normality statistics — Jarque–Bera, Lilliefors,
//!   the MSE/bias t and z statistics, and an Edgeworth density correction
//!   ([`normtest`]);
//! - a seeded, reproducible Monte Carlo lab ([`simlab`]) that runs the
//!   normality grid, the bootstrap rejection-rate study, and the
//!   published-results audit;
//! - an application pipeline ([`appfit`]) from a price series to a
//!   peaks-over-threshold tail fit with a bootstrap confidence interval.
//!
//! The lab and pipeline work in `f64`; the aliases below pin the core types
//! to that scalar.

pub mod appfit;
pub mod error;
pub mod estimators;
pub mod gpd;
pub mod normtest;
pub mod scalar;
pub mod simlab;
pub mod special;
pub mod stream;

pub use error::{Error, Result};
pub use estimators::Method;

/// GPD parameters over `f64`.
pub type GpdParams = gpd::GpdParams<f64>;
/// Ordered sample over `f64`.
pub type Sample = gpd::Sample<f64>;
/// Single estimate over `f64`.
pub type EstimateRecord = estimators::EstimateRecord<f64>;
/// Replicate batch over `f64`.
pub type EstimateBatch = estimators::EstimateBatch<f64>;
/// MSE/bias summary over `f64`.
pub type SimulationSummary = normtest::SimulationSummary<f64>;
/// Normality test report over `f64`.
pub type NormalityReport = normtest::NormalityReport<f64>;
/// Edgeworth correction inputs over `f64`.
pub type EdgeworthSpec = normtest::EdgeworthSpec<f64>;
