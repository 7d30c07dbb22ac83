//! Stage helpers that grow an attack graph past the rule-based edges, and the
//! confidence-threshold sweep built on them.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::af::ArgumentId;
use crate::attack::{
    cross_pair_arbitration, cross_session_pairs, semantic_conflict_edges, session_survivors, ArbitrationOutcome,
    AttackError, ConflictClassifier, GateConfig, SemanticOutcome,
};
use crate::graph::{AttackGraph, GraphError};
use crate::log::Argument;
use crate::metrics::selected_preferred_size;
use crate::providers::{ProviderError, SimilarityProvider};
use crate::resolve::{resolve, ResolutionConfig, ResolveError};

/// Survivors of every session present in the graph, keyed by session id.
/// Warnings come from sessions without candidates or that fell back.
pub fn survivor_map(graph: &AttackGraph) -> (BTreeMap<String, Vec<ArgumentId>>, Vec<String>) {
    let sessions: BTreeSet<&str> = graph.arguments.iter().filter_map(Argument::session).collect();
    let mut map = BTreeMap::new();
    let mut warnings = Vec::new();
    for s in sessions {
        let sv = session_survivors(&graph.arguments, &graph.attacks, s);
        warnings.extend(sv.warning);
        if !sv.members.is_empty() {
            map.insert(s.to_owned(), sv.members);
        }
    }
    (map, warnings)
}

/// Classifies cross-session survivor pairs without touching the graph.
pub fn classify_survivors(
    graph: &AttackGraph,
    classifier: &dyn ConflictClassifier,
    gate: GateConfig,
) -> Result<SemanticOutcome, AttackError> {
    let (survivors, _) = survivor_map(graph);
    let pairs = cross_session_pairs(&survivors);
    let mut refs = Vec::with_capacity(pairs.len());
    for (a, b) in &pairs {
        let x = graph.argument(a).ok_or_else(|| AttackError::UnknownArgument(a.clone()))?;
        let y = graph.argument(b).ok_or_else(|| AttackError::UnknownArgument(b.clone()))?;
        refs.push((x, y));
    }
    semantic_conflict_edges(&refs, classifier, gate)
}

/// Adds gated semantic edges to the graph. Returns the outcome and how many
/// edges were new (a pair already attacked keeps its first label).
pub fn add_semantic_edges(
    graph: &mut AttackGraph,
    classifier: &dyn ConflictClassifier,
    gate: GateConfig,
) -> Result<(SemanticOutcome, usize), AttackError> {
    let outcome = classify_survivors(graph, classifier, gate)?;
    let added = graph.extend_attacks(outcome.edges.iter().cloned());
    Ok((outcome, added))
}

#[derive(Debug, thiserror::Error)]
pub enum ArbitrationError {
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Runs one arbitration round over the session survivors and adds the
/// synthesized critiques and their edges.
pub fn add_arbitration(
    graph: &mut AttackGraph,
    similarity: &dyn SimilarityProvider,
    tau: f64,
) -> Result<ArbitrationOutcome, ArbitrationError> {
    let (survivors, _) = survivor_map(graph);
    let outcome = cross_pair_arbitration(&survivors, &graph.arguments, similarity, tau, graph.next_numbered_id())?;
    for c in &outcome.critiques {
        graph.add_argument(c.clone())?;
    }
    graph.extend_attacks(outcome.edges.iter().cloned());
    Ok(outcome)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta_eff: f64,
    pub semantic_edges: usize,
    pub gci: Option<f64>,
    pub grounded_size: usize,
    pub preferred_size: usize,
    pub preferred_count: usize,
}

/// Re-gates recorded verdicts at each threshold on top of `base` and resolves.
/// `base` should not already carry the outcome's edges.
pub fn theta_sweep(
    base: &AttackGraph,
    outcome: &SemanticOutcome,
    thetas: &[f64],
    config: &ResolutionConfig,
) -> Result<Vec<SweepRow>, ResolveError> {
    thetas
        .iter()
        .map(|&theta| {
            let mut g = base.clone();
            let semantic_edges = g.extend_attacks(outcome.regate(theta));
            let res = resolve(&g, config)?;
            let gci = g.framework()?.graph_stats(None).gci;
            Ok(SweepRow {
                theta_eff: theta,
                semantic_edges,
                gci,
                grounded_size: res.grounded.len(),
                preferred_size: selected_preferred_size(&res),
                preferred_count: res.preferred.len(),
            })
        })
        .collect()
}
