use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{ActType, NegotiationLog, TurnRef};
use crate::af::ArgumentId;
use crate::quality::QualityAxis;

/// Where an argument came from in the log.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArgumentSource {
    pub session: String,
    pub round: u32,
    pub turn_index: u32,
}

impl ArgumentSource {
    pub fn turn_ref(&self) -> TurnRef {
        TurnRef::new(self.session.clone(), self.turn_index)
    }
}

/// An argumentative act: `<id, type, content, agent, quality, rationale>` plus
/// its source turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Argument {
    pub id: ArgumentId,
    pub act: ActType,
    pub content: String,
    pub agent: String,
    pub quality: QualityAxis,
    #[serde(default)]
    pub rationale: String,
    /// `None` for arguments that did not come from a log turn (injected or synthesized).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<ArgumentSource>,
}

impl Argument {
    pub fn session(&self) -> Option<&str> {
        self.source.as_ref().map(|s| s.session.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArgumentSet {
    pub arguments: Vec<Argument>,
    pub by_turn: BTreeMap<TurnRef, ArgumentId>,
    pub warnings: Vec<String>,
}

impl ArgumentSet {
    pub fn len(&self) -> usize {
        self.arguments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arguments.is_empty()
    }

    pub fn get(&self, id: &ArgumentId) -> Option<&Argument> {
        self.arguments.iter().find(|a| &a.id == id)
    }

    pub fn for_turn(&self, r: &TurnRef) -> Option<&ArgumentId> {
        self.by_turn.get(r)
    }
}

/// Turns a log into arguments. The default reads the explicit act and
/// reference fields; a model-backed parser can implement the same trait.
pub trait ArgumentExtractor {
    fn extract(&self, log: &NegotiationLog) -> ArgumentSet;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StructuredExtractor;

impl ArgumentExtractor for StructuredExtractor {
    fn extract(&self, log: &NegotiationLog) -> ArgumentSet {
        let mut set = ArgumentSet::default();
        for (n, turn) in log.turns().enumerate() {
            let id = ArgumentId::numbered(n + 1);
            if turn.rationale.trim().is_empty() {
                set.warnings
                    .push(format!("{id} ({}): empty rationale", turn.reference()));
            }
            set.by_turn.insert(turn.reference(), id.clone());
            set.arguments.push(Argument {
                id,
                act: turn.act,
                content: turn.content.clone(),
                agent: turn.agent.clone(),
                quality: turn.quality_dimension.clone(),
                rationale: turn.rationale.clone(),
                source: Some(ArgumentSource {
                    session: turn.session_id.clone(),
                    round: turn.round,
                    turn_index: turn.turn_index,
                }),
            });
        }
        set
    }
}

impl NegotiationLog {
    pub fn extract_arguments(&self) -> ArgumentSet {
        StructuredExtractor.extract(self)
    }
}
