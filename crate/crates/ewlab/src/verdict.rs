//! Three-valued outcome shared by every checker.

use std::fmt;

/// Outcome of a bounded verification. `Fails` is a definite refutation with
/// the offending location; `Unknown` means the step budget or a search pool
/// ran out before a definite answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails { witness: String },
    Unknown { reason: String },
}

impl Verdict {
    pub fn fails(witness: impl Into<String>) -> Verdict {
        Verdict::Fails { witness: witness.into() }
    }

    pub fn unknown(reason: impl Into<String>) -> Verdict {
        Verdict::Unknown { reason: reason.into() }
    }

    pub fn is_holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    /// Combines verdicts: any failure dominates, then any unknown.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fails { witness }, _) | (_, Verdict::Fails { witness }) => {
                Verdict::Fails { witness }
            }
            (Verdict::Unknown { reason }, _) | (_, Verdict::Unknown { reason }) => {
                Verdict::Unknown { reason }
            }
            _ => Verdict::Holds,
        }
    }

    /// Exit-code convention: 0 holds, 1 fails, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Fails { .. } => 1,
            Verdict::Unknown { .. } => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::Fails { witness } => write!(f, "fails ({witness})"),
            Verdict::Unknown { reason } => write!(f, "unknown ({reason})"),
        }
    }
}
