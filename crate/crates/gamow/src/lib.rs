//! Evaluation of Gamow-peak reaction-rate integrals.
//!
//! The library computes the four barrier-penetration integrals that arise when a
//! Maxwell-Boltzmann energy distribution is folded with a Coulomb tunneling
//! probability (optionally with a high-energy cutoff, electrostatic screening, or
//! a high-energy tail depletion factor), and assembles thermonuclear reaction
//! rates from S-factor Taylor coefficients.
//!
//! Three independent evaluation routes are provided and cross-checked against
//! each other: convergent residue series, large-argument asymptotic formulas, and
//! adaptive Gauss-Kronrod quadrature. [`eval::evaluate`] dispatches between them.

pub mod asym;
pub mod calibrate;
pub mod config;
mod dd;
pub mod error;
pub mod eval;
pub mod meijer;
pub mod params;
pub mod quad;
pub mod rate;
pub mod series;
pub mod special;
mod sum;

pub use error::Error;
pub use eval::{choose_method, evaluate, EvalResult, Method, MethodChoice};
pub use params::{IntegralKind, IntegralParams};

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
