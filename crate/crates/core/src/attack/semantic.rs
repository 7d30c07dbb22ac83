use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AttackEdge, AttackError, EdgeOrigin, GateConfig};
use crate::af::ArgumentId;
use crate::log::Argument;
use crate::providers::{stable_hash, unit_interval, ProviderError};

/// Which way a flagged conflict points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConflictDirection {
    /// Neither can be realized alongside the other.
    #[default]
    Mutual,
    /// Realizing the first invalidates the second.
    FirstInvalidatesSecond,
    SecondInvalidatesFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConflictVerdict {
    pub is_conflict: bool,
    pub confidence: f64,
    #[serde(default)]
    pub rationale: String,
    #[serde(default)]
    pub direction: ConflictDirection,
}

impl ConflictVerdict {
    pub fn conflict(confidence: f64, rationale: impl Into<String>) -> Self {
        Self {
            is_conflict: true,
            confidence,
            rationale: rationale.into(),
            direction: ConflictDirection::Mutual,
        }
    }

    pub fn none() -> Self {
        Self {
            is_conflict: false,
            confidence: 0.0,
            rationale: String::new(),
            direction: ConflictDirection::Mutual,
        }
    }

    pub fn directed(mut self, direction: ConflictDirection) -> Self {
        self.direction = direction;
        self
    }
}

/// Decides whether realizing one argument makes the other infeasible.
/// Implementations may be called from several threads at once.
pub trait ConflictClassifier: Send + Sync {
    fn classify(&self, first: &Argument, second: &Argument) -> Result<ConflictVerdict, ProviderError>;
}

/// Flags every pair with the same confidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantClassifier {
    pub confidence: f64,
    pub direction: ConflictDirection,
}

impl ConstantClassifier {
    pub fn new(confidence: f64) -> Self {
        Self {
            confidence,
            direction: ConflictDirection::Mutual,
        }
    }
}

impl ConflictClassifier for ConstantClassifier {
    fn classify(&self, _: &Argument, _: &Argument) -> Result<ConflictVerdict, ProviderError> {
        Ok(ConflictVerdict::conflict(self.confidence, "constant stub").directed(self.direction))
    }
}

/// Flags every pair with a confidence drawn uniformly from `[low, high)`,
/// keyed on the seed and the unordered pair of argument contents.
#[derive(Debug, Clone, PartialEq)]
pub struct SeededClassifier {
    pub seed: u64,
    pub low: f64,
    pub high: f64,
}

impl SeededClassifier {
    pub fn new(seed: u64, low: f64, high: f64) -> Self {
        Self { seed, low, high }
    }

    /// Never reaches the default floor of 0.85.
    pub fn conservative(seed: u64) -> Self {
        Self::new(seed, 0.5, 0.8)
    }
}

impl ConflictClassifier for SeededClassifier {
    fn classify(&self, first: &Argument, second: &Argument) -> Result<ConflictVerdict, ProviderError> {
        let (a, b) = if first.content <= second.content {
            (&first.content, &second.content)
        } else {
            (&second.content, &first.content)
        };
        let h = stable_hash(&[&self.seed.to_le_bytes(), a.as_bytes(), b.as_bytes()]);
        let c = self.low + (self.high - self.low) * unit_interval(h);
        Ok(ConflictVerdict::conflict(c, format!("seeded stub ({})", self.seed)))
    }
}

/// Per-pair verdicts keyed on argument ids; unlisted pairs are not in conflict.
#[derive(Debug, Clone, Default)]
pub struct TableClassifier {
    verdicts: BTreeMap<(ArgumentId, ArgumentId), Result<ConflictVerdict, String>>,
}

impl TableClassifier {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a verdict for `(first, second)`. A directed verdict is read
    /// relative to this order.
    pub fn with(mut self, first: &str, second: &str, verdict: ConflictVerdict) -> Self {
        self.verdicts.insert((first.into(), second.into()), Ok(verdict));
        self
    }

    pub fn failing(mut self, first: &str, second: &str, message: &str) -> Self {
        self.verdicts.insert((first.into(), second.into()), Err(message.to_owned()));
        self
    }
}

impl ConflictClassifier for TableClassifier {
    fn classify(&self, first: &Argument, second: &Argument) -> Result<ConflictVerdict, ProviderError> {
        let fwd = self.verdicts.get(&(first.id.clone(), second.id.clone()));
        let entry = match fwd {
            Some(v) => v.clone(),
            None => match self.verdicts.get(&(second.id.clone(), first.id.clone())) {
                Some(Ok(v)) => Ok(ConflictVerdict {
                    direction: match v.direction {
                        ConflictDirection::FirstInvalidatesSecond => ConflictDirection::SecondInvalidatesFirst,
                        ConflictDirection::SecondInvalidatesFirst => ConflictDirection::FirstInvalidatesSecond,
                        ConflictDirection::Mutual => ConflictDirection::Mutual,
                    },
                    ..v.clone()
                }),
                Some(Err(e)) => Err(e.clone()),
                None => Ok(ConflictVerdict::none()),
            },
        };
        entry.map_err(|m| ProviderError::new("table-classifier", m))
    }
}

/// A classified pair, kept so the gate can be re-applied without asking the
/// classifier again.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub first: ArgumentId,
    pub second: ArgumentId,
    pub verdict: ConflictVerdict,
}

impl PairVerdict {
    /// Edges this verdict yields under the threshold `theta_eff`.
    pub fn edges(&self, theta_eff: f64) -> Vec<AttackEdge> {
        let v = &self.verdict;
        if !v.is_conflict || v.confidence < theta_eff {
            return Vec::new();
        }
        let edge = |attacker: &ArgumentId, target: &ArgumentId| AttackEdge {
            attacker: attacker.clone(),
            target: target.clone(),
            origin: EdgeOrigin::Semantic,
            confidence: v.confidence,
            rationale: v.rationale.clone(),
        };
        match v.direction {
            ConflictDirection::Mutual => vec![edge(&self.first, &self.second), edge(&self.second, &self.first)],
            ConflictDirection::FirstInvalidatesSecond => vec![edge(&self.first, &self.second)],
            ConflictDirection::SecondInvalidatesFirst => vec![edge(&self.second, &self.first)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPair {
    pub first: ArgumentId,
    pub second: ArgumentId,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SemanticOutcome {
    pub edges: Vec<AttackEdge>,
    pub verdicts: Vec<PairVerdict>,
    pub skipped: Vec<SkippedPair>,
    pub theta_eff: f64,
}

impl SemanticOutcome {
    /// Re-gates the recorded verdicts at another threshold.
    pub fn regate(&self, theta_eff: f64) -> Vec<AttackEdge> {
        self.verdicts.iter().flat_map(|p| p.edges(theta_eff)).collect()
    }
}

/// All unordered pairs of survivors drawn from two different sessions, in
/// session order then survivor order.
pub fn cross_session_pairs(survivors: &BTreeMap<String, Vec<ArgumentId>>) -> Vec<(ArgumentId, ArgumentId)> {
    let sessions: Vec<_> = survivors.iter().collect();
    let mut out = Vec::new();
    for (i, (_, xs)) in sessions.iter().enumerate() {
        for (_, ys) in &sessions[i + 1..] {
            for x in xs.iter() {
                for y in ys.iter() {
                    out.push((x.clone(), y.clone()));
                }
            }
        }
    }
    out
}

/// Classifies each cross-session pair and keeps conflicts whose confidence
/// reaches the effective gate. Classifier failures are recorded in
/// `skipped`; pairs from one session are rejected.
pub fn semantic_conflict_edges(
    pairs: &[(&Argument, &Argument)],
    classifier: &dyn ConflictClassifier,
    gate: GateConfig,
) -> Result<SemanticOutcome, AttackError> {
    for (a, b) in pairs {
        if a.session().is_some() && a.session() == b.session() {
            return Err(AttackError::SameSessionPair(a.id.clone(), b.id.clone()));
        }
    }

    let results: Vec<Result<ConflictVerdict, ProviderError>> = if pairs.len() > 16 {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
        let chunk = pairs.len().div_ceil(workers);
        std::thread::scope(|s| {
            let handles: Vec<_> = pairs
                .chunks(chunk)
                .map(|c| s.spawn(move || c.iter().map(|(a, b)| classifier.classify(a, b)).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("classifier thread panicked"))
                .collect()
        })
    } else {
        pairs.iter().map(|(a, b)| classifier.classify(a, b)).collect()
    };

    let theta_eff = gate.effective();
    let mut out = SemanticOutcome {
        theta_eff,
        ..SemanticOutcome::default()
    };
    for ((a, b), r) in pairs.iter().zip(results) {
        match r {
            Ok(verdict) if !(0.0..=1.0).contains(&verdict.confidence) => out.skipped.push(SkippedPair {
                first: a.id.clone(),
                second: b.id.clone(),
                reason: format!("confidence {} outside [0, 1]", verdict.confidence),
            }),
            Ok(verdict) => out.verdicts.push(PairVerdict {
                first: a.id.clone(),
                second: b.id.clone(),
                verdict,
            }),
            Err(e) => out.skipped.push(SkippedPair {
                first: a.id.clone(),
                second: b.id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    out.edges = out.regate(theta_eff);
    Ok(out)
}
