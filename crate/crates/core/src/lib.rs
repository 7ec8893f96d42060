//! Collision statistics for two recurring resource-contention problems in
//! high-performance computing: random address mapping into a k-way
//! set-associative cache, and static destination routing through an
//! oversubscribed switch.
//!
//! Both are birthday-paradox situations: the pigeonhole principle says a
//! conflict-free assignment exists, yet a random assignment collides far more
//! often than intuition suggests. The crate computes the analytic quantities
//! (expected stored count, no-conflict probability, no-collision probability)
//! and validates each against independent Monte Carlo simulation and
//! small-instance brute-force enumeration.
//!
//! The log-space analytic core is generic over the scalar type via
//! [`Real`]; the switch-port identities are carried as exact rationals.

pub mod cache;
pub mod cli;
pub mod comb;
pub mod error;
pub mod logreal;
pub mod rng;
pub mod scalar;
pub mod switch;

pub use error::{Error, Result};
pub use logreal::{log_sum_exp, LogReal};
pub use scalar::Real;

/// Log-domain magnitude at double precision; what the CLI works in.
pub type LogReal64 = LogReal<f64>;
/// Single-precision variant.
pub type LogReal32 = LogReal<f32>;
/// Exact rational used by the switch-port analysis.
pub type Rational = num_rational::BigRational;
