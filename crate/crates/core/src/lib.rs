//! Sticky Brownian Motion rounding of semidefinite relaxations for Max-Cut,
//! Max-2SAT and Max-DiCut, with three independent analysis engines for the
//! rounding probabilities: exact special-function formulas, elliptic
//! Dirichlet problems solved by finite differences, and Monte Carlo
//! simulation of the walk itself.
//!
//! Module map:
//!
//! * [`instances`] — problem types, file parsers, exact evaluation;
//! * [`sdp`] — vector relaxations and a low-rank factorized solver;
//! * [`specfun`] — gamma/beta/hypergeometric functions and exact
//!   separation probabilities;
//! * [`diffusion`] — the sticky walk (basic and slowdown) and estimators;
//! * [`pde`] — Dirichlet problems for the walk's absorption probabilities;
//! * [`ratio`] — worst-case configuration search for approximation ratios;
//! * [`maxprinciple`] — analytic sub-solutions and their grid verification;
//! * [`constrained`] — side-constrained Max-Cut rounding and its lemmas.

pub mod constrained;
pub mod diffusion;
pub mod error;
pub mod instances;
pub mod maxprinciple;
pub mod pde;
pub mod quad;
pub mod ratio;
pub mod sdp;
pub mod specfun;

pub use error::{Error, Result};
