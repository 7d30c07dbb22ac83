//! Runs a negotiation session with pluggable agents and records it as a log.

mod conflict;
mod scripted;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::log::{
    ActType, ConfigSnapshot, LogMetadata, NegotiationLog, Session, Termination, Turn, TurnRef, TurnStatus,
};
use crate::providers::{ProviderError, SimilarityProvider};
use crate::quality::QualityAxis;

pub use conflict::{detect_conflicts, ConflictLabel, ConflictReport, FixedLabeler, FlaggedPair, PairAction, PairLabeler};
pub use scripted::{ScriptEntry, ScriptedAgent, ScriptedScenario};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriverError {
    #[error("invalid protocol configuration: {0}")]
    InvalidConfig(String),
    #[error("the agent roster is empty")]
    EmptyRoster,
    #[error("roster names `{0}` but no such agent was supplied")]
    MissingAgent(String),
    #[error("conflict detection needs at least two candidates, got {0}")]
    TooFewCandidates(usize),
    #[error("malformed scenario: {0}")]
    Scenario(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub round_cap: u32,
    pub epsilon: f64,
    pub similarity_tau: f64,
    pub roster: Vec<String>,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            round_cap: 3,
            epsilon: 0.02,
            similarity_tau: 0.85,
            roster: Vec::new(),
        }
    }
}

impl ProtocolConfig {
    pub fn with_roster<S: Into<String>>(mut self, roster: impl IntoIterator<Item = S>) -> Self {
        self.roster = roster.into_iter().map(Into::into).collect();
        self
    }

    pub fn validate(&self) -> Result<(), DriverError> {
        if self.round_cap == 0 {
            return Err(DriverError::InvalidConfig("round_cap must be at least 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(DriverError::InvalidConfig(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.similarity_tau > 0.0 && self.similarity_tau <= 1.0) {
            return Err(DriverError::InvalidConfig(format!(
                "similarity_tau must lie in (0, 1], got {}",
                self.similarity_tau
            )));
        }
        if self.roster.is_empty() {
            return Err(DriverError::EmptyRoster);
        }
        Ok(())
    }

    fn snapshot(&self) -> ConfigSnapshot {
        let mut extra = BTreeMap::new();
        extra.insert("epsilon".to_owned(), serde_json::json!(self.epsilon));
        extra.insert("similarity_tau".to_owned(), serde_json::json!(self.similarity_tau));
        extra.insert("roster".to_owned(), serde_json::json!(self.roster));
        extra.insert("convergence_basis".to_owned(), serde_json::json!("focus_candidate"));
        ConfigSnapshot {
            round_cap: Some(self.round_cap),
            extra,
        }
    }
}

/// What an agent sees when asked for its turn.
#[derive(Debug, Clone, Copy)]
pub struct AgentContext<'a> {
    pub project: &'a str,
    pub session_id: &'a str,
    pub round: u32,
    pub transcript: &'a [Turn],
}

/// An agent's contribution. The driver fills in the reference fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentMove {
    pub act: ActType,
    pub content: String,
    #[serde(default)]
    pub rationale: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<TurnStatus>,
}

pub trait Agent: Send + Sync {
    fn name(&self) -> &str;
    fn quality(&self) -> QualityAxis;
    fn act(&self, ctx: &AgentContext<'_>) -> Result<AgentMove, ProviderError>;
}

fn latest_candidate(turns: &[Turn], pred: impl Fn(&Turn) -> bool) -> Option<&Turn> {
    turns.iter().rev().find(|t| t.act.is_requirement() && pred(t))
}

/// Builds the turn for `mv`, wiring references to the transcript so far.
fn place(session_id: &str, round: u32, agent: &dyn Agent, mv: AgentMove, transcript: &[Turn]) -> Result<Turn, String> {
    let name = agent.name();
    let reference = |t: &Turn| TurnRef::new(session_id, t.turn_index);
    let mut turn = Turn {
        session_id: session_id.to_owned(),
        round,
        turn_index: transcript.len() as u32 + 1,
        agent: name.to_owned(),
        act: mv.act,
        content: mv.content,
        quality_dimension: agent.quality(),
        rationale: mv.rationale,
        targets: Vec::new(),
        supersedes: None,
        resolves: Vec::new(),
        status: mv.status,
    };
    match mv.act {
        ActType::Proposal => {}
        ActType::Critique => {
            let target = latest_candidate(transcript, |t| t.agent != name)
                .ok_or_else(|| format!("{name} critiques in round {round} but nothing from another agent is on the table"))?;
            turn.targets.push(reference(target));
        }
        ActType::Refinement => {
            let own = latest_candidate(transcript, |t| t.agent == name)
                .ok_or_else(|| format!("{name} refines in round {round} without an earlier candidate of its own"))?;
            let own_ref = reference(own);
            turn.resolves = transcript
                .iter()
                .filter(|t| t.act == ActType::Critique && t.targets.contains(&own_ref))
                .map(reference)
                .collect();
            turn.supersedes = Some(own_ref);
        }
    }
    Ok(turn)
}

/// Runs one session. Every roster agent acts once per round in roster order;
/// the session stops when the focus candidate of a round is more than
/// `1 - epsilon` similar to the previous round's, or at the round cap. An
/// agent failure aborts the session but keeps the turns recorded so far.
pub fn run_negotiation(
    project: &str,
    session_id: &str,
    agents: &[&dyn Agent],
    config: &ProtocolConfig,
    similarity: &dyn SimilarityProvider,
) -> Result<NegotiationLog, DriverError> {
    config.validate()?;
    let by_name: BTreeMap<&str, &dyn Agent> = agents.iter().map(|a| (a.name(), *a)).collect();
    let roster: Vec<&dyn Agent> = config
        .roster
        .iter()
        .map(|n| by_name.get(n.as_str()).copied().ok_or_else(|| DriverError::MissingAgent(n.clone())))
        .collect::<Result<_, _>>()?;

    let mut transcript: Vec<Turn> = Vec::new();
    let mut notes = Vec::new();
    let mut previous_focus: Option<String> = None;
    let mut termination = Termination::RoundCap;

    'rounds: for round in 1..=config.round_cap {
        let start = transcript.len();
        for agent in &roster {
            let ctx = AgentContext {
                project,
                session_id,
                round,
                transcript: &transcript,
            };
            let placed = agent
                .act(&ctx)
                .map_err(|e| e.to_string())
                .and_then(|mv| place(session_id, round, *agent, mv, &transcript));
            match placed {
                Ok(turn) => transcript.push(turn),
                Err(msg) => {
                    notes.push(format!("aborted in round {round}: {msg}"));
                    termination = Termination::Aborted;
                    break 'rounds;
                }
            }
        }

        let focus = transcript[start..].iter().find(|t| t.act.is_requirement()).map(|t| t.content.clone());
        if let (Some(prev), Some(cur)) = (&previous_focus, &focus) {
            match similarity.similarity(prev, cur) {
                Ok(s) if s > 1.0 - config.epsilon => {
                    notes.push(format!("converged after round {round}: similarity {s:.4} > {:.4}", 1.0 - config.epsilon));
                    termination = Termination::Converged;
                    break;
                }
                Ok(_) => {}
                Err(e) => notes.push(format!("convergence check skipped in round {round}: {e}")),
            }
        }
        if focus.is_some() {
            previous_focus = focus;
        }
    }

    let session = Session {
        id: session_id.to_owned(),
        agents: config.roster.clone(),
        turns: transcript,
        termination: Some(termination),
    };
    Ok(NegotiationLog {
        metadata: LogMetadata {
            project: project.to_owned(),
            config: config.snapshot(),
            notes,
        },
        sessions: vec![session],
        pinned_attacks: Vec::new(),
    })
}
