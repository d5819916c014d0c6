use thiserror::Error;

use crate::zeta::ComplexPoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("s = {0} lies within 1e-6 of the pole at s = 1")]
    PoleProximity(ComplexPoint),

    #[error("s = {point} is outside the evaluation window (sigma in [{sigma_lo}, {sigma_hi}], |t| <= {t_abs_max})")]
    WindowExceeded {
        point: ComplexPoint,
        sigma_lo: f64,
        sigma_hi: f64,
        t_abs_max: f64,
    },

    #[error("cannot reach error target {target:e} at s = {point}: would need {needed} terms")]
    PrecisionLoss {
        point: ComplexPoint,
        target: f64,
        needed: f64,
    },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("Z({t}) has imaginary residual {residual:e}")]
    ImaginaryResidual { t: f64, residual: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    ConvergenceFailure { what: String, iterations: usize },

    #[error("launch point for k = {k} drifted to t = {t} (seed {seed})")]
    SeedDrift { k: i64, t: f64, seed: f64 },

    #[error("step collapsed below {min_step:e} at s = {at} (possible multiple zero or contour intersection)")]
    StepCollapse { at: ComplexPoint, min_step: f64 },

    #[error("trace exceeded {0} steps")]
    MaxSteps(usize),

    #[error("boundary contour k = {k} is not special: {reason}")]
    NotSpecial { k: i64, reason: String },

    #[error("primary zero of strip {m} at t = {t} lies outside [{bottom}, {top})")]
    EscapedStrip { m: usize, t: f64, bottom: f64, top: f64 },

    #[error("primary contour k = {k} reached the left edge without meeting a zero")]
    NoTerminalZero { k: i64 },

    #[error("zero at {at} is off the critical line")]
    OffCriticalLine { at: ComplexPoint },

    #[error("phase jump of {jump} rad at sample {index}")]
    PhaseJump { index: usize, jump: f64 },

    #[error("found {found} zeros in [{t_lo}, {t_hi}) but expected {expected}")]
    CountMismatch {
        t_lo: f64,
        t_hi: f64,
        expected: usize,
        found: usize,
    },

    #[error("primary zero of strip {m} at t = {t} matches none of the strip's zeros")]
    PrimaryUnmatched { m: usize, t: f64 },

    #[error("boundary {m} at t = {t} does not lie above the previous boundary at {previous}")]
    BoundaryOrder { m: usize, t: f64, previous: f64 },

    #[error("strip {m} contains no Gram points")]
    EmptyStrip { m: usize },

    #[error("strip {m}: {source}")]
    Strip {
        m: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_strip(self, m: usize) -> Self {
        match self {
            e @ Error::Strip { .. } => e,
            e => Error::Strip {
                m,
                source: Box::new(e),
            },
        }
    }

    /// Numerical anomalies that point at the strip structure itself rather
    /// than at bad input.
    pub fn is_math_anomaly(&self) -> bool {
        match self {
            Error::Strip { source, .. } => source.is_math_anomaly(),
            Error::NotSpecial { .. }
            | Error::CountMismatch { .. }
            | Error::StepCollapse { .. }
            | Error::EscapedStrip { .. }
            | Error::NoTerminalZero { .. }
            | Error::OffCriticalLine { .. }
            | Error::PrimaryUnmatched { .. }
            | Error::BoundaryOrder { .. }
            | Error::EmptyStrip { .. }
            | Error::MaxSteps(_)
            | Error::SeedDrift { .. }
            | Error::PhaseJump { .. } => true,
            _ => false,
        }
    }
}
