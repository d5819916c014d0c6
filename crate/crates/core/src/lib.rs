//! Numerical machinery for studying the strips cut out of the critical strip by
//! the `Im ζ(s) = 0` contour lines that run through special Gram points.
//!
//! The pipeline is layered bottom-up:
//!
//! * [`zeta`] evaluates `ζ(s)`, `ζ'(s)`, the Riemann–Siegel theta and Hardy's
//!   `Z(t)` by Euler–Maclaurin summation.
//! * [`gram`] locates Gram points and the smooth gap model `2π / ln(t/2π)`.
//! * [`contour`] traces `Im ζ = 0` level curves by predictor–corrector
//!   continuation, yielding strip boundaries and primary zeros.
//! * [`strips`] assembles strips, counts their zeros and checks the
//!   zero/Gram identity.
//! * [`analysis`] holds the regressions, deviation series and arch
//!   predictions.

// Negated comparisons below deliberately reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod contour;
mod error;
pub mod gram;
pub mod roots;
pub mod strips;
pub mod zeta;

pub use error::{Error, Result};
pub use zeta::{ComplexPoint, EvalParams, ZetaValue};

/// `2π / ln 2`, the mean strip height.
pub const STRIP_PERIOD: f64 = 2.0 * std::f64::consts::PI / std::f64::consts::LN_2;
