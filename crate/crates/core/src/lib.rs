//! Generalized Pólya urns as one-dimensional stochastic approximation
//! algorithms.
//!
//! * [`ratpoly`]: exact rational polynomials and certified root isolation on `[0, 1]`.
//! * [`sa`]: the stochastic approximation data model, equilibrium
//!   classification and the limit-prediction decision procedure.
//! * [`urns`]: one-draw and two-draw urn models, their drift and error
//!   polynomials, exact one-step moments and the degenerate reductions.
//! * [`montecarlo`]: seeded, order-independent simulation and the
//!   empirical checks (clustering, Kolmogorov–Smirnov against Beta laws).

#![forbid(unsafe_code)]

pub mod error;
pub mod montecarlo;
pub mod rational;
pub mod ratpoly;
pub mod sa;
pub mod urns;

pub use error::{Error, Result};
pub use rational::Rational;
pub use ratpoly::{RatPoly, RootRecord};
