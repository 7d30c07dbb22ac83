use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{GoalLevel, GoalNode, KaosGraph};
use crate::af::ArgumentId;
use crate::attack::EdgeOrigin;
use crate::graph::AttackGraph;
use crate::providers::{ProviderError, SimilarityProvider};
use crate::quality::{QualityAxis, Weights};
use crate::resolve::AcceptedRequirement;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HintGoal {
    pub description: String,
    pub quality_dimension: QualityAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HintTactical {
    pub key: String,
    pub description: String,
    pub quality_dimension: QualityAxis,
    #[serde(default)]
    pub rationale: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HintSubgoal {
    pub tactical: String,
    pub description: String,
    pub quality_dimension: QualityAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HintDecomposition {
    pub argument: ArgumentId,
    pub goals: Vec<HintSubgoal>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HintMerge {
    pub from: ArgumentId,
    pub into: ArgumentId,
}

/// Optional layout guidance: the root goal, named Tactical concerns, how a
/// requirement splits into Operational goals, and requirements to fold into
/// one another. Stands in for a model-backed decomposition step.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KaosHints {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategic: Option<HintGoal>,
    #[serde(default)]
    pub tactical: Vec<HintTactical>,
    #[serde(default)]
    pub decompositions: Vec<HintDecomposition>,
    #[serde(default)]
    pub merges: Vec<HintMerge>,
}

impl KaosHints {
    pub fn parse(document: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(document)
    }
}

pub struct IntegrationInput<'a> {
    pub project: &'a str,
    pub requirements: &'a [AcceptedRequirement],
    /// Source of supersedes links and argument rationales.
    pub graph: &'a AttackGraph,
    pub similarity: &'a dyn SimilarityProvider,
    /// Near-duplicate threshold.
    pub tau: f64,
    pub weights: &'a Weights,
    pub hints: Option<&'a KaosHints>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeKind {
    /// A later version of the same requirement was also accepted.
    Subsumption,
    NearDuplicate,
    Hint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeRecord {
    pub kind: MergeKind,
    pub absorbed: ArgumentId,
    pub into: ArgumentId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub similarity: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Integration {
    pub model: KaosGraph,
    pub merges: Vec<MergeRecord>,
    pub warnings: Vec<String>,
}

struct Cluster {
    primary: ArgumentId,
    content: String,
    quality: QualityAxis,
    provenance: Vec<ArgumentId>,
    ancestors: Vec<ArgumentId>,
}

/// Arguments `id` supersedes, nearest first.
fn supersede_chain(graph: &AttackGraph, id: &ArgumentId) -> Vec<ArgumentId> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::from([id.clone()]);
    let mut cur = id.clone();
    loop {
        let mut next: Vec<&ArgumentId> = graph
            .outgoing(&cur)
            .filter(|e| e.origin == EdgeOrigin::P2)
            .map(|e| &e.target)
            .collect();
        next.sort();
        match next.first() {
            Some(n) if seen.insert((*n).clone()) => {
                out.push((*n).clone());
                cur = (*n).clone();
            }
            _ => return out,
        }
    }
}

fn absorb(clusters: &mut Vec<Cluster>, from: usize, into: usize, as_ancestor: bool) {
    let c = clusters.remove(from);
    let into = if from < into { into - 1 } else { into };
    let target = &mut clusters[into];
    if as_ancestor {
        target.ancestors.extend(c.provenance);
    } else {
        target.provenance.extend(c.provenance);
    }
    target.ancestors.extend(c.ancestors);
}

/// Builds the three-level goal model from the accepted requirements.
///
/// Requirements whose later version was also accepted become ancestors of
/// that version's goal, hinted merges and near-duplicates (similarity at or
/// above `tau`) share one goal, each remaining requirement yields one
/// Operational goal (or several, when a decomposition hint names it), and
/// Operational goals hang under one Tactical goal per quality dimension
/// beneath a single Strategic root.
pub fn integrate(input: &IntegrationInput<'_>) -> Result<Integration, ProviderError> {
    let mut out = Integration::default();
    if input.requirements.is_empty() {
        out.warnings.push("no accepted requirements; the goal model is empty".to_owned());
        return Ok(out);
    }
    let hints = input.hints.cloned().unwrap_or_default();

    let mut reqs: Vec<&AcceptedRequirement> = input.requirements.iter().collect();
    reqs.sort_by(|a, b| a.argument.cmp(&b.argument));
    let accepted: BTreeSet<&ArgumentId> = reqs.iter().map(|r| &r.argument).collect();
    let chains: BTreeMap<&ArgumentId, Vec<ArgumentId>> =
        reqs.iter().map(|r| (&r.argument, supersede_chain(input.graph, &r.argument))).collect();

    let mut clusters: Vec<Cluster> = reqs
        .iter()
        .map(|r| Cluster {
            primary: r.argument.clone(),
            content: r.content.clone(),
            quality: r.quality.clone(),
            provenance: vec![r.argument.clone()],
            ancestors: Vec::new(),
        })
        .collect();

    // subsumption: earlier accepted versions fold into the latest accepted one
    for r in &reqs {
        let is_head = !chains.iter().any(|(other, ch)| *other != &r.argument && ch.contains(&r.argument));
        if !is_head {
            continue;
        }
        for anc in chains[&r.argument].iter().filter(|a| accepted.contains(a)) {
            let from = clusters.iter().position(|c| &c.primary == anc);
            let into = clusters.iter().position(|c| c.primary == r.argument);
            if let (Some(f), Some(i)) = (from, into) {
                absorb(&mut clusters, f, i, true);
                out.merges.push(MergeRecord {
                    kind: MergeKind::Subsumption,
                    absorbed: anc.clone(),
                    into: r.argument.clone(),
                    similarity: None,
                });
            }
        }
    }

    for m in &hints.merges {
        let from = clusters.iter().position(|c| c.primary == m.from);
        let into = clusters.iter().position(|c| c.primary == m.into);
        match (from, into) {
            (Some(f), Some(i)) if f != i => {
                absorb(&mut clusters, f, i, false);
                out.merges.push(MergeRecord {
                    kind: MergeKind::Hint,
                    absorbed: m.from.clone(),
                    into: m.into.clone(),
                    similarity: None,
                });
            }
            _ => out
                .warnings
                .push(format!("merge hint {} -> {} does not match two accepted requirements", m.from, m.into)),
        }
    }

    let mut i = 0;
    while i < clusters.len() {
        let mut j = i + 1;
        while j < clusters.len() {
            let s = input.similarity.similarity(&clusters[i].content, &clusters[j].content)?;
            if s >= input.tau {
                out.merges.push(MergeRecord {
                    kind: MergeKind::NearDuplicate,
                    absorbed: clusters[j].primary.clone(),
                    into: clusters[i].primary.clone(),
                    similarity: Some(s),
                });
                absorb(&mut clusters, j, i, false);
            } else {
                j += 1;
            }
        }
        i += 1;
    }

    let mut model = KaosGraph::default();
    let rationale_of = |id: &ArgumentId| {
        let a = input.graph.argument(id);
        let who = a.map_or_else(String::new, |a| format!(" ({} by {})", a.act, a.agent));
        let why = a.map(|a| a.rationale.trim()).filter(|r| !r.is_empty());
        match why {
            Some(w) => format!("accepted requirement {id}{who}: {w}"),
            None => format!("accepted requirement {id}{who}"),
        }
    };

    // tactical goals named by hints, then per-quality ones on demand
    let mut tactical_by_key: BTreeMap<String, String> = BTreeMap::new();
    for t in &hints.tactical {
        let id = model.next_id("TG");
        model.goals.push(GoalNode {
            goal_id: id.clone(),
            description: t.description.clone(),
            quality_dimension: t.quality_dimension.clone(),
            level: GoalLevel::Tactical,
            rationale: if t.rationale.trim().is_empty() {
                format!("groups the {} concern `{}`", t.quality_dimension, t.key)
            } else {
                t.rationale.clone()
            },
            provenance: Vec::new(),
            merged_ancestors: Vec::new(),
        });
        tactical_by_key.insert(t.key.clone(), id);
    }
    let mut tactical_by_quality: BTreeMap<QualityAxis, String> = BTreeMap::new();
    let mut tactical_for = |model: &mut KaosGraph, q: &QualityAxis| -> String {
        if let Some(id) = tactical_by_quality.get(q) {
            return id.clone();
        }
        let id = model.next_id("TG");
        model.goals.push(GoalNode {
            goal_id: id.clone(),
            description: format!("Meet the {q} concerns of the accepted requirements"),
            quality_dimension: q.clone(),
            level: GoalLevel::Tactical,
            rationale: format!("groups the accepted {q} requirements"),
            provenance: Vec::new(),
            merged_ancestors: Vec::new(),
        });
        tactical_by_quality.insert(q.clone(), id.clone());
        id
    };

    let mut pending_links: Vec<(String, String)> = Vec::new();
    for c in &clusters {
        let rationale = rationale_of(&c.primary);
        let split = hints.decompositions.iter().find(|d| d.argument == c.primary);
        let parts: Vec<(String, QualityAxis, Option<&str>)> = match split {
            Some(d) if !d.goals.is_empty() => d
                .goals
                .iter()
                .map(|g| (g.description.clone(), g.quality_dimension.clone(), Some(g.tactical.as_str())))
                .collect(),
            _ => vec![(c.content.clone(), c.quality.clone(), None)],
        };
        for (description, quality, key) in parts {
            let id = model.next_id("OG");
            let parent = match key.map(|k| (k, tactical_by_key.get(k))) {
                Some((_, Some(t))) => t.clone(),
                Some((k, None)) => {
                    out.warnings.push(format!("{id}: unknown tactical key `{k}`; grouped by quality"));
                    tactical_for(&mut model, &quality)
                }
                None => tactical_for(&mut model, &quality),
            };
            model.goals.push(GoalNode {
                goal_id: id.clone(),
                description,
                quality_dimension: quality,
                level: GoalLevel::Operational,
                rationale: rationale.clone(),
                provenance: c.provenance.clone(),
                merged_ancestors: c.ancestors.clone(),
            });
            pending_links.push((parent, id));
        }
    }
    for (p, c) in &pending_links {
        model.link(p, c);
    }

    let unused: Vec<String> = model
        .goals
        .iter()
        .filter(|g| g.level == GoalLevel::Tactical && model.children(&g.goal_id).next().is_none())
        .map(|g| g.goal_id.clone())
        .collect();
    for id in unused {
        out.warnings.push(format!("tactical goal {id} has no operational goals and was dropped"));
        model.goals.retain(|g| g.goal_id != id);
    }

    let root = match &hints.strategic {
        Some(h) => GoalNode {
            goal_id: "SG1".to_owned(),
            description: h.description.clone(),
            quality_dimension: h.quality_dimension.clone(),
            level: GoalLevel::Strategic,
            rationale: h.rationale.clone().unwrap_or_else(|| "root goal of the project".to_owned()),
            provenance: Vec::new(),
            merged_ancestors: Vec::new(),
        },
        None => {
            let description = input.project.trim();
            GoalNode {
                goal_id: "SG1".to_owned(),
                description: if description.is_empty() {
                    "Satisfy the negotiated requirements".to_owned()
                } else {
                    description.to_owned()
                },
                quality_dimension: dominant_quality(&model, input.weights),
                level: GoalLevel::Strategic,
                rationale: "root goal synthesized from the project description".to_owned(),
                provenance: Vec::new(),
                merged_ancestors: Vec::new(),
            }
        }
    };
    model.goals.insert(0, root);
    let tactical: Vec<String> = model
        .goals
        .iter()
        .filter(|g| g.level == GoalLevel::Tactical)
        .map(|g| g.goal_id.clone())
        .collect();
    for t in tactical {
        model.link("SG1", &t);
    }
    out.warnings.extend(model.enforce_levels());
    model.links.sort_by(|a, b| (&a.parent, &a.child).cmp(&(&b.parent, &b.child)));
    out.model = model;
    Ok(out)
}

/// The axis with most Operational goals; ties go to the heavier weight, then
/// to name order.
fn dominant_quality(model: &KaosGraph, weights: &Weights) -> QualityAxis {
    let mut counts: BTreeMap<&QualityAxis, usize> = BTreeMap::new();
    for g in model.goals.iter().filter(|g| g.level == GoalLevel::Operational) {
        *counts.entry(&g.quality_dimension).or_insert(0) += 1;
    }
    counts
        .into_iter()
        .max_by(|(qa, na), (qb, nb)| {
            na.cmp(nb)
                .then(weights.get(qa).unwrap_or(0.0).total_cmp(&weights.get(qb).unwrap_or(0.0)))
                .then(qb.cmp(qa))
        })
        .map(|(q, _)| q.clone())
        .unwrap_or_else(|| QualityAxis::new("safety"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::log::{ActType, NegotiationLog};
    use crate::providers::{FixedSimilarity, TokenCosine};
    use crate::resolve::{resolve, ResolutionConfig};

    fn running() -> (AttackGraph, Vec<AcceptedRequirement>, String) {
        let log = NegotiationLog::parse(fixtures::AD_SENSOR_FUSION).unwrap();
        let (g, _) = AttackGraph::from_log(&log).unwrap();
        let r = resolve(&g, &ResolutionConfig::grounded()).unwrap();
        (g, r.accepted_requirements, log.metadata.project)
    }

    fn run(hints: Option<&KaosHints>, sim: &dyn SimilarityProvider) -> Integration {
        let (g, reqs, project) = running();
        let w = Weights::uniform();
        integrate(&IntegrationInput {
            project: &project,
            requirements: &reqs,
            graph: &g,
            similarity: sim,
            tau: 0.85,
            weights: &w,
            hints,
        })
        .unwrap()
    }

    fn ids(v: &[ArgumentId]) -> Vec<&str> {
        v.iter().map(|a| a.as_str()).collect()
    }

    #[test]
    fn hinted_layout_has_one_three_four_shape() {
        let hints = KaosHints::parse(fixtures::AD_KAOS_HINTS).unwrap();
        let out = run(Some(&hints), &TokenCosine);
        let m = &out.model;
        assert_eq!(m.count_level(GoalLevel::Strategic), 1);
        assert_eq!(m.count_level(GoalLevel::Tactical), 3);
        assert_eq!(m.count_level(GoalLevel::Operational), 4);
        assert!(m.is_acyclic());
        assert!(out.warnings.is_empty(), "{:?}", out.warnings);
        for g in m.goals.iter().filter(|g| g.level == GoalLevel::Operational) {
            assert_eq!(ids(&g.provenance), ["a5", "a6"]);
            assert_eq!(ids(&g.merged_ancestors), ["a1"]);
        }
        let traced: Vec<String> = m.traced_arguments().iter().map(|a| a.to_string()).collect();
        assert_eq!(traced, ["a1", "a5", "a6"]);
        assert!(out.merges.iter().any(|r| r.kind == MergeKind::Subsumption && r.absorbed.as_str() == "a1"));
    }

    #[test]
    fn default_layout_groups_by_quality() {
        let out = run(None, &TokenCosine);
        let m = &out.model;
        assert_eq!(m.count_level(GoalLevel::Strategic), 1);
        assert_eq!(m.count_level(GoalLevel::Tactical), 2);
        assert_eq!(m.count_level(GoalLevel::Operational), 2);
        let a5 = m.goals.iter().find(|g| g.provenance.contains(&"a5".into())).unwrap();
        assert_eq!(ids(&a5.merged_ancestors), ["a1"]);
        assert_eq!(m.traced_arguments().len(), 3);
    }

    #[test]
    fn single_requirement_is_bridged() {
        let g = AttackGraph::new(vec![crate::resolve::tests::bare("p", ActType::Proposal, "green")]).unwrap();
        let reqs = resolve(&g, &ResolutionConfig::grounded()).unwrap().accepted_requirements;
        let w = Weights::uniform();
        let out = integrate(&IntegrationInput {
            project: "p",
            requirements: &reqs,
            graph: &g,
            similarity: &TokenCosine,
            tau: 0.85,
            weights: &w,
            hints: None,
        })
        .unwrap();
        let m = &out.model;
        assert_eq!((m.count_level(GoalLevel::Strategic), m.count_level(GoalLevel::Tactical), m.count_level(GoalLevel::Operational)), (1, 1, 1));
        assert_eq!(m.links.len(), 2);
    }

    #[test]
    fn identical_requirements_merge() {
        let out = run(None, &FixedSimilarity(1.0));
        let ops: Vec<&GoalNode> = out.model.goals.iter().filter(|g| g.level == GoalLevel::Operational).collect();
        assert_eq!(ops.len(), 1);
        assert_eq!(ids(&ops[0].provenance), ["a5", "a6"]);
    }

    #[test]
    fn empty_input_warns() {
        let g = AttackGraph::default();
        let w = Weights::uniform();
        let out = integrate(&IntegrationInput {
            project: "p",
            requirements: &[],
            graph: &g,
            similarity: &TokenCosine,
            tau: 0.85,
            weights: &w,
            hints: None,
        })
        .unwrap();
        assert!(out.model.goals.is_empty());
        assert_eq!(out.warnings.len(), 1);
    }
}
