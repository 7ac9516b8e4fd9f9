//! Witness-carrying verification outcomes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::indexset::Key;

/// How much of each quantifier domain a verdict actually inspected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Mode {
    /// Every quantifier domain was enumerated in full.
    Exact,
    /// Quantifiers ranged over elements of rank at most `horizon` only.
    Windowed { horizon: usize },
}

impl Mode {
    /// The weaker of two modes: exact only if both are.
    pub fn meet(self, other: Mode) -> Mode {
        match (self, other) {
            (Mode::Exact, Mode::Exact) => Mode::Exact,
            (Mode::Windowed { horizon }, _) | (_, Mode::Windowed { horizon }) => {
                Mode::Windowed { horizon }
            }
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Mode::Exact)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    /// The window was too small to decide. Never a refutation.
    Inconclusive,
}

impl Status {
    /// Conjunction: any failure wins, then any inconclusive part.
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Holds,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Inconclusive => "inconclusive",
        })
    }
}

/// Existential choices made for one instance of the universal quantifiers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    /// Values of the universally quantified variables.
    pub at: Vec<Key>,
    /// Values chosen for the existential variables, outermost first.
    pub chosen: Vec<Key>,
}

impl Witness {
    pub fn new(at: Vec<Key>, chosen: Vec<Key>) -> Self {
        Witness { at, chosen }
    }
}

/// Concrete elements on which a checked condition breaks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub elements: Vec<Key>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub mode: Mode,
    pub status: Status,
    pub witnesses: Vec<Witness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Verdict {
    pub fn holds(mode: Mode, witnesses: Vec<Witness>) -> Self {
        Verdict {
            mode,
            status: Status::Holds,
            witnesses,
            counterexample: None,
            note: None,
        }
    }

    pub fn fails(mode: Mode, elements: Vec<Key>, reason: impl Into<String>) -> Self {
        Verdict {
            mode,
            status: Status::Fails,
            witnesses: Vec::new(),
            counterexample: Some(Counterexample {
                elements,
                reason: reason.into(),
            }),
            note: None,
        }
    }

    pub fn inconclusive(mode: Mode, elements: Vec<Key>, reason: impl Into<String>) -> Self {
        Verdict {
            mode,
            status: Status::Inconclusive,
            witnesses: Vec::new(),
            counterexample: Some(Counterexample {
                elements,
                reason: reason.into(),
            }),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn is_fails(&self) -> bool {
        self.status == Status::Fails
    }

    pub fn is_inconclusive(&self) -> bool {
        self.status == Status::Inconclusive
    }

    /// Exact and holding.
    pub fn holds_exactly(&self) -> bool {
        self.is_holds() && self.mode.is_exact()
    }

    /// Combine the verdicts of independent sub-checks of one conjunction.
    /// Witnesses are concatenated; the first failing (else inconclusive)
    /// counterexample is kept.
    pub fn all(mode: Mode, parts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::holds(mode, Vec::new());
        for part in parts {
            out.mode = out.mode.meet(part.mode);
            let before = out.status;
            out.status = out.status.and(part.status);
            out.witnesses.extend(part.witnesses);
            if out.status != before || (out.counterexample.is_none() && part.status != Status::Holds)
            {
                if part.counterexample.is_some() {
                    out.counterexample = part.counterexample;
                }
                if part.note.is_some() {
                    out.note = part.note;
                }
            }
        }
        out
    }
}

/// Outcome of an existential search over candidates in enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Search {
    /// First surviving candidate. `forced` marks a candidate that lies at the
    /// top of the window after earlier candidates failed; under windowed
    /// semantics such a witness is not trusted.
    Found { witness: Key, forced: bool },
    NotFound,
}
