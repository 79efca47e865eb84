//! Zero-order online convex optimization with randomization on the ℓ1-sphere.
//!
//! The crate provides the pieces of a two-point-feedback online optimizer and
//! the statistical machinery around it:
//!
//! - [`rng`] — seedable streams and samplers (Laplace, ℓ1-sphere, ℓ1-ball,
//!   ℓ2-sphere),
//! - [`geometry`] — ℓp-norm bookkeeping and the dimension factor `b_q(d)`,
//! - [`mirror`] — closed-form dual-averaging geometries (entropy on the
//!   simplex, squared ℓ2 on the unit ball),
//! - [`estimator`] — the two-point oracle, noise models, and the compact
//!   sign-based gradient estimate plus its dense ℓ2-sphere baseline,
//! - [`dual_averaging`] — the online loop with four step-size/discretization
//!   schedules (constant and adaptive, with and without noise),
//! - [`verify`] — Monte Carlo checks of the estimator's moment, bias,
//!   variance, and concentration properties with explicit tolerances.

pub mod dual_averaging;
pub mod error;
pub mod estimator;
pub mod geometry;
pub mod mirror;
pub mod rng;
pub mod verify;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
