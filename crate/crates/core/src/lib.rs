//! A compartmental epidemic model in which noncompliance with interventions
//! spreads through the population like a second contagion.
//!
//! The population splits into susceptible, infected, and recovered classes,
//! each further divided into compliant and noncompliant groups. Disease
//! transmission follows mass action; noncompliance is itself transmitted by
//! contact with the noncompliant group and is abandoned at a controllable
//! return rate. Four bounded controls act on the system: transmission
//! reduction `alpha`, treatment `eta`, suppression `mu` of the
//! noncompliance spread, and promotion `nu` of the return to compliance.
//!
//! The crate provides:
//!
//! - the controlled vector field, running cost, and explicit Euler
//!   integration ([`model`], [`solver`]);
//! - disease-free equilibria, next-generation matrices, reproductive
//!   ratios, and linearized stability classification ([`analysis`]);
//! - a forward-backward sweep solver for the optimal-control problem
//!   ([`solver::fbs_solve`]);
//! - three ready-made experiment configurations with cost-reduction
//!   reports and parameter sweeps ([`scenarios`]).
//!
//! Everything is generic over the floating-point type through the
//! [`Scalar`] trait; `*64` aliases fix `f64` for ordinary use.
//!
//! ```
//! use sirnc::{Controls64, Params64};
//!
//! let cfg = sirnc::scenarios::builtin_scenario::<f64>(
//!     "S1".parse().unwrap(),
//!     &sirnc::scenarios::Overrides::default(),
//! )
//! .unwrap();
//! let p: Params64 = cfg.params;
//! let dfes = sirnc::analysis::compute_dfes(p, Controls64::zero()).unwrap();
//! let r0 = sirnc::analysis::reproductive_ratio(dfes[0], p, Controls64::zero()).unwrap();
//! assert!((r0 - 40.0 / 21.0).abs() < 1e-12);
//! ```

pub mod analysis;
pub mod error;
pub mod model;
pub mod scalar;
pub mod scenarios;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Model parameters over `f64`.
pub type Params64 = model::ModelParams<f64>;
/// Compartment state over `f64`.
pub type State64 = model::State<f64>;
/// Control vector over `f64`.
pub type Controls64 = model::ControlVec<f64>;
/// Objective weights over `f64`.
pub type Weights64 = model::CostWeights<f64>;
/// Adjoint vector over `f64`.
pub type Costate64 = solver::CostateVec<f64>;
/// Time grid over `f64`.
pub type Grid64 = solver::Grid<f64>;
/// State trajectory over `f64`.
pub type StateTrajectory64 = solver::StateTrajectory<f64>;
/// Control trajectory over `f64`.
pub type ControlTrajectory64 = solver::ControlTrajectory<f64>;
/// Adjoint trajectory over `f64`.
pub type CostateTrajectory64 = solver::CostateTrajectory<f64>;
