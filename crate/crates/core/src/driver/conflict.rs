use std::fmt;

use serde::{Deserialize, Serialize};

use super::DriverError;
use crate::providers::{ProviderError, SimilarityProvider};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictLabel {
    Redundant,
    ResourceBound,
    LogicalIncompatibility,
}

impl fmt::Display for ConflictLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConflictLabel::Redundant => "redundant",
            ConflictLabel::ResourceBound => "resource_bound",
            ConflictLabel::LogicalIncompatibility => "logical_incompatibility",
        })
    }
}

/// Second-stage labelling of a similar pair.
pub trait PairLabeler: Send + Sync {
    fn label(&self, a: &str, b: &str) -> Result<ConflictLabel, ProviderError>;
}

/// Gives every pair the same label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FixedLabeler(pub ConflictLabel);

impl PairLabeler for FixedLabeler {
    fn label(&self, _: &str, _: &str) -> Result<ConflictLabel, ProviderError> {
        Ok(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairAction {
    /// Near-duplicates to merge.
    Consolidate,
    /// A genuine conflict that opens a negotiation session.
    Debate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedPair {
    pub first: usize,
    pub second: usize,
    pub similarity: f64,
    pub label: ConflictLabel,
    pub action: PairAction,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConflictReport {
    pub flagged: Vec<FlaggedPair>,
    pub diagnostics: Vec<String>,
}

impl ConflictReport {
    pub fn debates(&self) -> impl Iterator<Item = &FlaggedPair> {
        self.flagged.iter().filter(|p| p.action == PairAction::Debate)
    }
}

/// Two-stage screening of candidate requirements: pairs whose similarity
/// reaches `tau` are labelled; redundant ones are consolidated, the rest
/// go to debate. Provider failures skip the pair with a diagnostic.
pub fn detect_conflicts(
    candidates: &[String],
    similarity: &dyn SimilarityProvider,
    labeler: &dyn PairLabeler,
    tau: f64,
) -> Result<ConflictReport, DriverError> {
    if candidates.len() < 2 {
        return Err(DriverError::TooFewCandidates(candidates.len()));
    }
    let mut report = ConflictReport::default();
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            let s = match similarity.similarity(&candidates[i], &candidates[j]) {
                Ok(s) => s,
                Err(e) => {
                    report.diagnostics.push(format!("pair ({i}, {j}) skipped at stage 1: {e}"));
                    continue;
                }
            };
            if s < tau {
                continue;
            }
            match labeler.label(&candidates[i], &candidates[j]) {
                Ok(label) => report.flagged.push(FlaggedPair {
                    first: i,
                    second: j,
                    similarity: s,
                    label,
                    action: if label == ConflictLabel::Redundant {
                        PairAction::Consolidate
                    } else {
                        PairAction::Debate
                    },
                }),
                Err(e) => report.diagnostics.push(format!("pair ({i}, {j}) skipped at stage 2: {e}")),
            }
        }
    }
    Ok(report)
}
