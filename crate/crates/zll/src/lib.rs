//! Numerical laboratory around the Riemann zeta function on and off the
//! critical line.
//!
//! The crate builds, from scratch and in pure f64:
//!
//! * dual-route zeta evaluators (truncated Dirichlet series, Euler-Maclaurin,
//!   an alternating-series path, and the Riemann-Siegel formula for Hardy's
//!   Z function),
//! * the ladder transform phi1(T): the solution V of
//!   `V ln V + (c - ln 2pi) V = integral of Z^2 over [0, T]`,
//!   tabulated once and interpolated monotonically,
//! * exact prime counting by sieve, used to test the drift law
//!   `t - phi1(t) ~ (1 - c) pi(t)`,
//! * local mean value checks for `|zeta(sigma + it)|^2` on sigma > 1,
//! * a search for interval points where
//!   `Z^2(u) |zeta(sigma0 + i phi1(u))|^2 = (1/2) zeta(2 sigma0) ln u`
//!   together with residual envelopes and segment-distance statistics.
//!
//! Everything is deterministic: no global caches that change results, no
//! seeded randomness in library code, and all parallel reductions are
//! order-fixed so worker count never affects output bytes.

pub mod aa;
pub mod error;
pub mod interp;
pub mod ladder;
pub mod mvt;
pub mod primes;
pub mod quad;
pub mod report;
pub mod zeta;

pub use error::{Error, Result};

/// Euler's constant.
pub const EULER: f64 = 0.577_215_664_901_532_9;

/// ln(2 pi).
pub const LN_TWO_PI: f64 = 1.837_877_066_409_345_5;

/// Smallest T for which the ladder machinery is defined.
pub const T_OPERATIONAL_MIN: f64 = 1.0e3;
