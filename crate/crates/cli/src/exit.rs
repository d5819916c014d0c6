//! Exit-code taxonomy.

use std::fmt;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Io = 1,
    MathAnomaly = 2,
    MissingInputs = 3,
    Usage = 4,
    VerifyFailed = 5,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        self as i32
    }
}

/// An error that carries its own exit code.
#[derive(Debug, thiserror::Error)]
pub struct Coded {
    pub kind: ExitKind,
    pub message: String,
}

impl fmt::Display for Coded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn coded(kind: ExitKind, message: impl Into<String>) -> anyhow::Error {
    Coded {
        kind,
        message: message.into(),
    }
    .into()
}

/// Exit code for an error chain: the first tagged cause wins, library
/// anomalies map to 2, bad parameters to 4, everything else to 1.
pub fn exit_kind(err: &anyhow::Error) -> ExitKind {
    for cause in err.chain() {
        if let Some(c) = cause.downcast_ref::<Coded>() {
            return c.kind;
        }
        if let Some(e) = cause.downcast_ref::<zeta_strips::Error>() {
            if e.is_math_anomaly() {
                return ExitKind::MathAnomaly;
            }
            if matches!(e, zeta_strips::Error::InvalidParams(_)) {
                return ExitKind::Usage;
            }
        }
    }
    ExitKind::Io
}
