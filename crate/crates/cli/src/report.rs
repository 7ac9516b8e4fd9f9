//! Reports written to standard output.

use prokit_core::{Error, Status, Verdict};
use serde::{Deserialize, Serialize};

use crate::doc::{DocError, SystemDocument};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: CommandEcho,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    /// `holds`, `fails`, `inconclusive` or `error`.
    pub outcome: String,
    pub exit_code: i32,
    pub verdicts: Vec<NamedVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<SystemDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub timing: Timing,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedVerdict {
    pub name: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_ms: f64,
}

pub fn status_code(s: Status) -> i32 {
    match s {
        Status::Holds => EXIT_HOLDS,
        Status::Fails => EXIT_FAILS,
        Status::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// A command failure with the exit code it maps to.
#[derive(Debug, Clone)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::Precondition(_) => (EXIT_FAILS, "precondition"),
            Error::Inconclusive { .. } => (EXIT_INCONCLUSIVE, "inconclusive"),
            Error::Boundary(_) => (EXIT_USAGE, "boundary"),
            Error::Composition => (EXIT_USAGE, "boundary"),
            Error::Unsupported(_) => (EXIT_USAGE, "unsupported"),
            Error::Generation(_) => (EXIT_USAGE, "generation"),
            Error::MalformedMorphism(_) | Error::MalformedObject(_) | Error::Undefined { .. } => {
                (EXIT_USAGE, "document")
            }
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        match e {
            DocError::Core(inner) => {
                let mut f = Failure::from(inner);
                // anything going wrong while loading is a document problem
                if f.code == EXIT_FAILS {
                    f.code = EXIT_USAGE;
                    f.kind = "document";
                }
                f
            }
            DocError::Parse { .. } => Failure {
                code: EXIT_USAGE,
                kind: "parse",
                message: e.to_string(),
            },
            DocError::Invalid(_) => Failure {
                code: EXIT_USAGE,
                kind: "document",
                message: e.to_string(),
            },
        }
    }
}

/// Combined status of a verdict list; empty lists hold.
pub fn combined(verdicts: &[NamedVerdict]) -> Status {
    verdicts.iter().fold(Status::Holds, |s, v| s.and(v.verdict.status))
}

/// Timing-free copy, for determinism comparisons.
pub fn without_timing(mut r: Report) -> Report {
    r.timing.elapsed_ms = 0.0;
    r
}
