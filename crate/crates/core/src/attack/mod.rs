//! Construction of the attack relation.
//!
//! Three deterministic patterns cover attacks inside a negotiation session:
//! a critique attacks what it targets (P1), a refinement attacks the earlier
//! version it supersedes from the same agent (P2), and a refinement attacks
//! the critique it resolves (P3). Conflicts across sessions go through a
//! confidence-gated classifier, and the optional arbitration round adds
//! mutual critiques between sessions that compete for one resource.

mod arbitration;
mod rules;
mod semantic;
mod support;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::af::ArgumentId;

pub use arbitration::{cross_pair_arbitration, ArbitrationOutcome, Overlap};
pub use rules::{rule_based_attacks, session_survivors, RuleAttacks, Survivors};
pub use semantic::{
    cross_session_pairs, semantic_conflict_edges, ConflictClassifier, ConflictDirection, ConflictVerdict,
    ConstantClassifier, PairVerdict, SeededClassifier, SemanticOutcome, SkippedPair, TableClassifier,
};
pub use support::validate_support;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EdgeOrigin {
    P1,
    P2,
    P3,
    #[serde(rename = "semantic")]
    Semantic,
    #[serde(rename = "arbitration")]
    Arbitration,
    #[serde(rename = "manual")]
    Manual,
}

impl EdgeOrigin {
    pub fn is_rule_based(self) -> bool {
        matches!(self, EdgeOrigin::P1 | EdgeOrigin::P2 | EdgeOrigin::P3)
    }

    pub const ALL: [EdgeOrigin; 6] = [
        EdgeOrigin::P1,
        EdgeOrigin::P2,
        EdgeOrigin::P3,
        EdgeOrigin::Semantic,
        EdgeOrigin::Arbitration,
        EdgeOrigin::Manual,
    ];
}

impl fmt::Display for EdgeOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeOrigin::P1 => "P1",
            EdgeOrigin::P2 => "P2",
            EdgeOrigin::P3 => "P3",
            EdgeOrigin::Semantic => "semantic",
            EdgeOrigin::Arbitration => "arbitration",
            EdgeOrigin::Manual => "manual",
        })
    }
}

/// A directed attack `attacker -> target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackEdge {
    pub attacker: ArgumentId,
    pub target: ArgumentId,
    pub origin: EdgeOrigin,
    /// 1.0 for rule-based edges.
    pub confidence: f64,
    #[serde(default)]
    pub rationale: String,
}

impl AttackEdge {
    pub fn rule(attacker: ArgumentId, target: ArgumentId, origin: EdgeOrigin, rationale: impl Into<String>) -> Self {
        Self {
            attacker,
            target,
            origin,
            confidence: 1.0,
            rationale: rationale.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportEdge {
    pub supporter: ArgumentId,
    pub supported: ArgumentId,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttackError {
    #[error("threshold `{name}` must lie in [0, 1], got {value}")]
    ThresholdOutOfRange { name: &'static str, value: f64 },
    #[error("arguments {0} and {1} come from the same session")]
    SameSessionPair(ArgumentId, ArgumentId),
    #[error("unknown argument `{0}`")]
    UnknownArgument(ArgumentId),
}

/// Confidence gate for classifier-proposed edges: `max(theta_floor, theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    pub theta: f64,
    pub theta_floor: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            theta: 0.7,
            theta_floor: 0.85,
        }
    }
}

impl GateConfig {
    pub fn new(theta: f64, theta_floor: f64) -> Result<Self, AttackError> {
        for (name, value) in [("theta", theta), ("theta_floor", theta_floor)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(AttackError::ThresholdOutOfRange { name, value });
            }
        }
        Ok(Self { theta, theta_floor })
    }

    /// A gate whose effective threshold is exactly `value`.
    pub fn exactly(value: f64) -> Result<Self, AttackError> {
        Self::new(value, value)
    }

    pub fn effective(&self) -> f64 {
        self.theta_floor.max(self.theta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn effective_threshold_is_the_max() {
        assert_eq!(GateConfig::default().effective(), 0.85);
        assert_eq!(GateConfig::new(0.9, 0.85).unwrap().effective(), 0.9);
        assert!(GateConfig::new(1.2, 0.5).is_err());
    }

    #[test]
    fn origin_labels_round_trip() {
        for o in EdgeOrigin::ALL {
            let s = serde_json::to_string(&o).unwrap();
            assert_eq!(s.trim_matches('"'), o.to_string());
            assert_eq!(serde_json::from_str::<EdgeOrigin>(&s).unwrap(), o);
        }
    }
}
