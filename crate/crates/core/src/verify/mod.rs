//! Three-layer verification of a goal model: structural rules, grounding of
//! goal text in a reference corpus, and clause coverage. Verification only
//! annotates; the model is never changed.

mod layer1;
mod providers;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::af::ArgumentId;
use crate::graph::AttackGraph;
use crate::kaos::KaosGraph;
use crate::providers::cosine;
use crate::resolve::AcceptedRequirement;

pub use layer1::{layer1_structural_check, Rule, Severity, Violation};
pub use providers::{
    BruteForceStore, Clause, Embedder, EntailmentProvider, EntailmentVerdict, HashedBagOfWords, OverlapEntailment, Passage,
    TableEmbedder, TableEntailment, VectorStore,
};

pub const DEFAULT_TAU_H: f64 = 0.60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("the reference corpus is empty")]
    EmptyCorpus,
    #[error("tau_h must lie in [0, 1], got {0}")]
    BadThreshold(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HallucinationFlag {
    pub goal_id: String,
    pub nearest_passage: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nearest_source: Option<String>,
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseResult {
    pub clause_id: String,
    pub satisfied: bool,
    /// First accepted requirement found to satisfy the clause.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satisfied_by: Option<ArgumentId>,
    #[serde(default)]
    pub rationale: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Compliance {
    pub applicable_clauses: usize,
    pub satisfied: usize,
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clauses: Vec<ClauseResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Layer2,
    Layer3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
    pub hallucination_flags: Vec<HallucinationFlag>,
    pub compliance: Compliance,
    pub blocked_at: Option<Layer>,
    pub tau_h: f64,
    pub content_digest_before: String,
    pub content_digest_after: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl VerificationReport {
    pub fn has_errors(&self) -> bool {
        self.violations.iter().any(|v| v.severity == Severity::Error)
    }
}

/// Hex SHA-256 over the goals in serialized form.
pub fn content_digest(model: &KaosGraph) -> String {
    let bytes = serde_json::to_vec(&model.goals).expect("goals serialize");
    let d = Sha256::digest(&bytes);
    d.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct VerifyInput<'a> {
    pub model: &'a KaosGraph,
    pub af_graph: &'a AttackGraph,
    pub accepted: &'a [AcceptedRequirement],
    pub corpus: &'a [Passage],
    pub clauses: &'a [Clause],
    pub embedder: &'a dyn Embedder,
    pub entailment: &'a dyn EntailmentProvider,
    pub tau_h: f64,
}

/// A clause applies when tagged `all` (or `*`) or tagged with a quality
/// dimension that some goal carries.
fn applicable<'a>(model: &KaosGraph, clauses: &'a [Clause]) -> Vec<&'a Clause> {
    clauses
        .iter()
        .filter(|c| {
            let tag = c.applicability.trim().to_lowercase();
            tag == "all" || tag == "*" || model.goals.iter().any(|g| g.quality_dimension.as_str() == tag)
        })
        .collect()
}

/// Runs the three layers. Any error-level structural violation stops the
/// run before Layer 2.
pub fn verify(input: &VerifyInput<'_>) -> Result<VerificationReport, VerifyError> {
    if input.corpus.is_empty() {
        return Err(VerifyError::EmptyCorpus);
    }
    if !(0.0..=1.0).contains(&input.tau_h) {
        return Err(VerifyError::BadThreshold(input.tau_h));
    }
    let before = content_digest(input.model);
    let violations = layer1_structural_check(input.model, input.af_graph);
    let mut report = VerificationReport {
        violations,
        hallucination_flags: Vec::new(),
        compliance: Compliance::default(),
        blocked_at: None,
        tau_h: input.tau_h,
        content_digest_before: before,
        content_digest_after: String::new(),
        diagnostics: Vec::new(),
    };
    if report.has_errors() {
        report.blocked_at = Some(Layer::Layer2);
        report.compliance.note = Some("not evaluated: structural errors block layers 2 and 3".to_owned());
        report.content_digest_after = content_digest(input.model);
        return Ok(report);
    }

    // layer 2
    let mut store = BruteForceStore::default();
    for p in input.corpus {
        match input.embedder.embed(&p.text) {
            Ok(v) => store.insert(p.clone(), v),
            Err(e) => report.diagnostics.push(format!("passage {} not indexed: {e}", p.clause_id)),
        }
    }
    for g in &input.model.goals {
        let q = match input.embedder.embed(&g.description) {
            Ok(q) => q,
            Err(e) => {
                report.diagnostics.push(format!("goal {} not checked: {e}", g.goal_id));
                continue;
            }
        };
        match store.nearest(&q) {
            Some((p, s)) if s < input.tau_h => report.hallucination_flags.push(HallucinationFlag {
                goal_id: g.goal_id.clone(),
                nearest_passage: p.text.clone(),
                nearest_source: Some(format!("{} {}", p.source, p.clause_id)),
                similarity: s,
            }),
            Some(_) => {}
            None => report.diagnostics.push(format!("goal {} not checked: empty index", g.goal_id)),
        }
    }

    // layer 3
    let clauses = applicable(input.model, input.clauses);
    let texts: Vec<&str> = input.accepted.iter().map(|r| r.content.as_str()).collect();
    let mut c = Compliance::default();
    for clause in clauses {
        match input.entailment.entails(clause, &texts) {
            Ok(verdict) => {
                c.applicable_clauses += 1;
                if verdict.satisfied {
                    c.satisfied += 1;
                }
                c.clauses.push(ClauseResult {
                    clause_id: clause.clause_id.clone(),
                    satisfied: verdict.satisfied,
                    satisfied_by: verdict.satisfied_by.and_then(|i| input.accepted.get(i)).map(|r| r.argument.clone()),
                    rationale: verdict.rationale,
                });
            }
            Err(e) => report
                .diagnostics
                .push(format!("clause {} not evaluated: {e}", clause.clause_id)),
        }
    }
    if c.applicable_clauses == 0 {
        c.note = Some("no applicable clauses; coverage undefined".to_owned());
    } else {
        c.gamma = Some(c.satisfied as f64 / c.applicable_clauses as f64);
    }
    report.compliance = c;
    report.content_digest_after = content_digest(input.model);
    Ok(report)
}

/// Cosine similarity re-exported for embedder implementations.
pub fn vector_cosine(a: &[f64], b: &[f64]) -> f64 {
    cosine(a, b)
}
