//! Structured negotiation logs.
//!
//! A log is a list of sessions; each session is an ordered list of typed
//! turns (proposal, critique, refinement) whose cross-references are explicit
//! `{session, turn_index}` objects. Documents are JSON.

mod extract;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quality::QualityAxis;

pub use extract::{Argument, ArgumentExtractor, ArgumentSet, ArgumentSource, StructuredExtractor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActType {
    Proposal,
    Critique,
    Refinement,
}

impl ActType {
    /// Proposals and refinements carry requirement content; critiques do not.
    pub fn is_requirement(self) -> bool {
        !matches!(self, ActType::Critique)
    }
}

impl fmt::Display for ActType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActType::Proposal => "proposal",
            ActType::Critique => "critique",
            ActType::Refinement => "refinement",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TurnStatus {
    Unresolved,
    Partial,
    Resolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    RoundCap,
    Aborted,
}

/// Pointer to a turn.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TurnRef {
    pub session: String,
    pub turn_index: u32,
}

impl TurnRef {
    pub fn new(session: impl Into<String>, turn_index: u32) -> Self {
        Self {
            session: session.into(),
            turn_index,
        }
    }
}

impl fmt::Display for TurnRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.session, self.turn_index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    /// Filled from the enclosing session on parse; not part of the document.
    #[serde(default, skip_serializing)]
    pub session_id: String,
    pub round: u32,
    pub turn_index: u32,
    pub agent: String,
    pub act: ActType,
    pub content: String,
    pub quality_dimension: QualityAxis,
    #[serde(default)]
    pub rationale: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<TurnRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supersedes: Option<TurnRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resolves: Vec<TurnRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<TurnStatus>,
}

impl Turn {
    pub fn reference(&self) -> TurnRef {
        TurnRef::new(self.session_id.clone(), self.turn_index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    #[serde(default)]
    pub agents: Vec<String>,
    #[serde(default)]
    pub turns: Vec<Turn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
}

impl Session {
    pub fn rounds(&self) -> u32 {
        self.turns.iter().map(|t| t.round).max().unwrap_or(0)
    }

    pub fn turn(&self, turn_index: u32) -> Option<&Turn> {
        self.turns.iter().find(|t| t.turn_index == turn_index)
    }
}

/// Snapshot of the protocol configuration a log was produced under.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_cap: Option<u32>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LogMetadata {
    #[serde(default)]
    pub project: String,
    #[serde(default)]
    pub config: ConfigSnapshot,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

/// An attack recorded alongside the log rather than derived from turn
/// references, e.g. a previously reviewed classifier verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinnedAttack {
    pub attacker: TurnRef,
    pub target: TurnRef,
    pub origin: crate::attack::EdgeOrigin,
    #[serde(default = "one")]
    pub confidence: f64,
    #[serde(default)]
    pub rationale: String,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NegotiationLog {
    #[serde(default)]
    pub metadata: LogMetadata,
    #[serde(default)]
    pub sessions: Vec<Session>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pinned_attacks: Vec<PinnedAttack>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LogError {
    #[error("malformed log document at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate session id `{0}`")]
    DuplicateSession(String),
    #[error("session `{session}`: duplicate turn index {turn_index}")]
    DuplicateTurn { session: String, turn_index: u32 },
    #[error("session `{session}`: turn index {turn_index} does not increase")]
    NonIncreasingTurn { session: String, turn_index: u32 },
    #[error("{at}: {field} must be positive")]
    NonPositive { at: TurnRef, field: &'static str },
    #[error("{at}: required field `{field}` is empty")]
    EmptyField { at: TurnRef, field: &'static str },
    #[error("{at}: round {round} exceeds the configured cap {cap}")]
    RoundOverCap { at: TurnRef, round: u32, cap: u32 },
    #[error("{at}: agent `{agent}` is not a participant of the session")]
    UnknownAgent { at: TurnRef, agent: String },
    #[error("{at}: critique has no target")]
    CritiqueWithoutTarget { at: TurnRef },
    #[error("{at}: refinement neither supersedes nor resolves a turn")]
    RefinementWithoutReference { at: TurnRef },
    #[error("{at}: {kind} reference `{reference}` does not point to an earlier turn of the same session")]
    DanglingReference {
        at: TurnRef,
        kind: &'static str,
        reference: TurnRef,
    },
    #[error("{kind} references are only valid on {allowed} turns ({at})")]
    MisplacedReference {
        at: TurnRef,
        kind: &'static str,
        allowed: &'static str,
    },
    #[error("pinned attack references unknown turn `{0}`")]
    DanglingPinned(TurnRef),
}

impl NegotiationLog {
    /// Parses and validates a JSON log document.
    pub fn parse(document: &str) -> Result<Self, LogError> {
        let mut log: NegotiationLog = serde_json::from_str(document).map_err(|e| LogError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        for session in &mut log.sessions {
            for turn in &mut session.turns {
                turn.session_id = session.id.clone();
            }
        }
        log.validate()?;
        Ok(log)
    }

    pub fn to_document(&self) -> String {
        serde_json::to_string_pretty(self).expect("log serialization is infallible")
    }

    pub fn turn_count(&self) -> usize {
        self.sessions.iter().map(|s| s.turns.len()).sum()
    }

    pub fn session(&self, id: &str) -> Option<&Session> {
        self.sessions.iter().find(|s| s.id == id)
    }

    pub fn turn(&self, r: &TurnRef) -> Option<&Turn> {
        self.session(&r.session)?.turn(r.turn_index)
    }

    pub fn turns(&self) -> impl Iterator<Item = &Turn> {
        self.sessions.iter().flat_map(|s| s.turns.iter())
    }

    pub fn validate(&self) -> Result<(), LogError> {
        let mut session_ids = BTreeSet::new();
        for session in &self.sessions {
            if !session_ids.insert(session.id.as_str()) {
                return Err(LogError::DuplicateSession(session.id.clone()));
            }
            self.validate_session(session)?;
        }
        for pin in &self.pinned_attacks {
            for r in [&pin.attacker, &pin.target] {
                if self.turn(r).is_none() {
                    return Err(LogError::DanglingPinned(r.clone()));
                }
            }
        }
        Ok(())
    }

    fn validate_session(&self, session: &Session) -> Result<(), LogError> {
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        let mut last: Option<u32> = None;
        for turn in &session.turns {
            let at = TurnRef::new(session.id.clone(), turn.turn_index);
            if turn.turn_index == 0 {
                return Err(LogError::NonPositive { at, field: "turn_index" });
            }
            if turn.round == 0 {
                return Err(LogError::NonPositive { at, field: "round" });
            }
            if seen.contains(&turn.turn_index) {
                return Err(LogError::DuplicateTurn {
                    session: session.id.clone(),
                    turn_index: turn.turn_index,
                });
            }
            if last.is_some_and(|l| turn.turn_index < l) {
                return Err(LogError::NonIncreasingTurn {
                    session: session.id.clone(),
                    turn_index: turn.turn_index,
                });
            }
            if let Some(cap) = self.metadata.config.round_cap {
                if turn.round > cap {
                    return Err(LogError::RoundOverCap { at, round: turn.round, cap });
                }
            }
            for (field, value) in [("agent", &turn.agent), ("content", &turn.content)] {
                if value.trim().is_empty() {
                    return Err(LogError::EmptyField { at, field });
                }
            }
            if turn.quality_dimension.is_empty() {
                return Err(LogError::EmptyField { at, field: "quality_dimension" });
            }
            if !session.agents.is_empty() && !session.agents.contains(&turn.agent) {
                return Err(LogError::UnknownAgent { at, agent: turn.agent.clone() });
            }

            match turn.act {
                ActType::Critique if turn.targets.is_empty() => {
                    return Err(LogError::CritiqueWithoutTarget { at });
                }
                ActType::Refinement if turn.supersedes.is_none() && turn.resolves.is_empty() => {
                    return Err(LogError::RefinementWithoutReference { at });
                }
                _ => {}
            }
            if turn.act != ActType::Critique && !turn.targets.is_empty() {
                return Err(LogError::MisplacedReference { at, kind: "targets", allowed: "critique" });
            }
            if turn.act != ActType::Refinement && (turn.supersedes.is_some() || !turn.resolves.is_empty()) {
                return Err(LogError::MisplacedReference {
                    at,
                    kind: "supersedes/resolves",
                    allowed: "refinement",
                });
            }

            let refs = turn
                .targets
                .iter()
                .map(|r| ("targets", r))
                .chain(turn.supersedes.iter().map(|r| ("supersedes", r)))
                .chain(turn.resolves.iter().map(|r| ("resolves", r)));
            for (kind, r) in refs {
                if r.session != session.id || !seen.contains(&r.turn_index) {
                    return Err(LogError::DanglingReference {
                        at: at.clone(),
                        kind,
                        reference: r.clone(),
                    });
                }
            }

            seen.insert(turn.turn_index);
            last = Some(turn.turn_index);
        }
        Ok(())
    }
}
