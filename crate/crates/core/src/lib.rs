//! Numerical laboratory for time-power-series solutions of polynomial ODEs.
//!
//! The crate generates the Taylor expansion about `t = 0` of three classic
//! nonlinear systems (a Riccati equation, the Lotka-Volterra prey-predator
//! model and the SIR epidemic model), measures how far those expansions can
//! be trusted, and compares them against closed-form solutions and an
//! adaptive Runge-Kutta reference.
//!
//! Module map:
//!
//! - [`field`]: polynomial vector fields and the three model builders.
//! - [`series`]: truncated power series and the coefficient recursion.
//! - [`convergence`]: exact and estimated radii of convergence.
//! - [`exact`]: closed forms, conserved quantities and epidemic endpoints.
//! - [`roots`] and [`quadrature`]: bracketed root finding and adaptive
//!   Gauss-Kronrod integration used by [`exact`].
//! - [`integrate`]: multistage Taylor stepping and the reference integrator.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod error;
pub mod exact;
pub mod field;
pub mod integrate;
pub mod quadrature;
pub mod roots;
pub mod series;

pub use error::{Error, Result};
pub use field::{Model, ModelInstance, Monomial, PolynomialVectorField};
pub use series::{SeriesSolution, TruncatedSeries};
