//! Resolution of an attack graph into an accepted requirement set, with the
//! provenance needed to explain it.

mod trace;
mod whatif;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::af::{ArgumentId, Extension, Semantics};
use crate::attack::EdgeOrigin;
use crate::graph::{AttackGraph, GraphError};
use crate::log::ActType;
use crate::quality::{QualityAxis, Weights};

pub use trace::{trace_card, trace_cards, trace_completeness, CardOrigin, TraceCard, TraceStep};
pub use whatif::{what_if_inject, what_if_reconfigure, what_if_remove_attack, JournalEntry, Operation, OverrideJournal};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PreferredStrategy {
    #[default]
    Intersection,
    PriorityGuided,
}

impl fmt::Display for PreferredStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PreferredStrategy::Intersection => "intersection",
            PreferredStrategy::PriorityGuided => "priority_guided",
        })
    }
}

impl FromStr for PreferredStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "intersection" => Ok(Self::Intersection),
            "priority" | "priority_guided" => Ok(Self::PriorityGuided),
            other => Err(format!("unknown preferred strategy `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionConfig {
    pub semantics: Semantics,
    #[serde(default)]
    pub preferred_strategy: PreferredStrategy,
    #[serde(default = "Weights::uniform")]
    pub weights: Weights,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        Self {
            semantics: Semantics::Grounded,
            preferred_strategy: PreferredStrategy::Intersection,
            weights: Weights::uniform(),
        }
    }
}

impl ResolutionConfig {
    pub fn grounded() -> Self {
        Self::default()
    }

    pub fn preferred(strategy: PreferredStrategy) -> Self {
        Self {
            semantics: Semantics::Preferred,
            preferred_strategy: strategy,
            ..Self::default()
        }
    }

    pub fn with_weights(mut self, weights: Weights) -> Self {
        self.weights = weights;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ResolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no weight for quality axis `{0}`")]
    MissingWeight(QualityAxis),
    #[error("argument `{0}` is not in the selected extension")]
    NotInExtension(ArgumentId),
    #[error("argument `{0}` is not an accepted requirement")]
    NotAccepted(ArgumentId),
    #[error("unknown argument `{0}`")]
    UnknownArgument(ArgumentId),
}

/// A requirement kept after resolution: the content of an accepted
/// non-critique argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptedRequirement {
    pub argument: ArgumentId,
    pub content: String,
    pub act: ActType,
    pub agent: String,
    pub quality: QualityAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenseStep {
    pub attacker: ArgumentId,
    pub attack_origin: EdgeOrigin,
    /// A selected argument that attacks `attacker`; `None` when the selected
    /// set leaves this attack unanswered (possible under intersection).
    pub defender: Option<ArgumentId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defense_origin: Option<EdgeOrigin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefenseChain {
    pub root: ArgumentId,
    pub steps: Vec<DefenseStep>,
}

impl DefenseChain {
    pub fn is_defended(&self) -> bool {
        self.steps.iter().all(|s| s.defender.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentStatus {
    pub selected: bool,
    pub in_grounded: bool,
    pub skeptically_preferred: bool,
    pub credulously_preferred: bool,
}

/// How priority-guided selection scored the preferred extensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrioritySelection {
    pub scores: Vec<f64>,
    pub chosen: usize,
    /// More than one extension reached the top score; canonical order decided.
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resolution {
    pub config: ResolutionConfig,
    pub extension: Extension,
    pub accepted_requirements: Vec<AcceptedRequirement>,
    pub status: BTreeMap<ArgumentId, ArgumentStatus>,
    pub defense_chains: BTreeMap<ArgumentId, DefenseChain>,
    pub grounded: BTreeSet<ArgumentId>,
    pub preferred: Vec<BTreeSet<ArgumentId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priority: Option<PrioritySelection>,
}

impl Resolution {
    pub fn is_accepted_requirement(&self, id: &ArgumentId) -> bool {
        self.accepted_requirements.iter().any(|r| &r.argument == id)
    }
}

fn score(graph: &AttackGraph, members: &BTreeSet<ArgumentId>, weights: &Weights) -> Result<f64, ResolveError> {
    members.iter().try_fold(0.0, |acc, id| {
        let arg = graph.argument(id).ok_or_else(|| ResolveError::UnknownArgument(id.clone()))?;
        let w = weights
            .get(&arg.quality)
            .ok_or_else(|| ResolveError::MissingWeight(arg.quality.clone()))?;
        Ok(acc + w)
    })
}

fn select_by_priority(
    graph: &AttackGraph,
    preferred: &[BTreeSet<ArgumentId>],
    weights: &Weights,
) -> Result<(BTreeSet<ArgumentId>, PrioritySelection), ResolveError> {
    let scores = preferred
        .iter()
        .map(|e| score(graph, e, weights))
        .collect::<Result<Vec<_>, _>>()?;
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * best.abs().max(1.0);
    let winners: Vec<usize> = (0..scores.len()).filter(|&i| best - scores[i] <= tol).collect();
    let chosen = winners.first().copied().unwrap_or(0);
    let set = preferred.get(chosen).cloned().unwrap_or_default();
    Ok((
        set,
        PrioritySelection {
            scores,
            chosen,
            tie: winners.len() > 1,
        },
    ))
}

/// Defence chain of `id` with respect to `selected`.
pub fn defense_chain(
    graph: &AttackGraph,
    selected: &BTreeSet<ArgumentId>,
    id: &ArgumentId,
) -> Result<DefenseChain, ResolveError> {
    if !selected.contains(id) {
        return Err(ResolveError::NotInExtension(id.clone()));
    }
    let mut incoming: Vec<_> = graph.incoming(id).collect();
    incoming.sort_by(|a, b| a.attacker.cmp(&b.attacker));
    let steps = incoming
        .into_iter()
        .map(|e| {
            let counter = graph
                .incoming(&e.attacker)
                .filter(|c| selected.contains(&c.attacker))
                .min_by(|a, b| a.attacker.cmp(&b.attacker));
            DefenseStep {
                attacker: e.attacker.clone(),
                attack_origin: e.origin,
                defender: counter.map(|c| c.attacker.clone()),
                defense_origin: counter.map(|c| c.origin),
            }
        })
        .collect();
    Ok(DefenseChain { root: id.clone(), steps })
}

/// Resolves `graph` under `config`.
pub fn resolve(graph: &AttackGraph, config: &ResolutionConfig) -> Result<Resolution, ResolveError> {
    let af = graph.framework()?;
    let grounded = af.grounded_extension().members;
    let preferred: Vec<BTreeSet<ArgumentId>> = af.preferred_extensions().into_iter().map(|e| e.members).collect();

    let mut priority = None;
    let members = match (config.semantics, config.preferred_strategy) {
        (Semantics::Grounded, _) => grounded.clone(),
        (Semantics::Preferred, PreferredStrategy::Intersection) => {
            let mut it = preferred.iter();
            let first = it.next().cloned().unwrap_or_default();
            it.fold(first, |acc, e| acc.intersection(e).cloned().collect())
        }
        (Semantics::Preferred, PreferredStrategy::PriorityGuided) => {
            // every axis in use needs a weight, even outside the winning set
            for a in &graph.arguments {
                if config.weights.get(&a.quality).is_none() {
                    return Err(ResolveError::MissingWeight(a.quality.clone()));
                }
            }
            let (set, sel) = select_by_priority(graph, &preferred, &config.weights)?;
            priority = Some(sel);
            set
        }
    };

    let mut accepted_requirements = Vec::new();
    let mut defense_chains = BTreeMap::new();
    for id in &members {
        let arg = graph.argument(id).ok_or_else(|| ResolveError::UnknownArgument(id.clone()))?;
        if arg.act.is_requirement() {
            accepted_requirements.push(AcceptedRequirement {
                argument: id.clone(),
                content: arg.content.clone(),
                act: arg.act,
                agent: arg.agent.clone(),
                quality: arg.quality.clone(),
            });
        }
        defense_chains.insert(id.clone(), defense_chain(graph, &members, id)?);
    }

    let status = af
        .arguments()
        .iter()
        .map(|id| {
            let s = ArgumentStatus {
                selected: members.contains(id),
                in_grounded: grounded.contains(id),
                skeptically_preferred: !preferred.is_empty() && preferred.iter().all(|e| e.contains(id)),
                credulously_preferred: preferred.iter().any(|e| e.contains(id)),
            };
            (id.clone(), s)
        })
        .collect();

    Ok(Resolution {
        config: config.clone(),
        extension: Extension {
            semantics: config.semantics,
            members,
        },
        accepted_requirements,
        status,
        defense_chains,
        grounded,
        preferred,
        priority,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::attack::AttackEdge;
    use crate::fixtures;
    use crate::log::{Argument, NegotiationLog};

    pub(crate) fn running_graph() -> AttackGraph {
        let log = NegotiationLog::parse(fixtures::AD_SENSOR_FUSION).unwrap();
        AttackGraph::from_log(&log).unwrap().0
    }

    pub(crate) fn bare(id: &str, act: ActType, quality: &str) -> Argument {
        Argument {
            id: id.into(),
            act,
            content: format!("content of {id}"),
            agent: format!("{quality}-agent"),
            quality: quality.into(),
            rationale: String::new(),
            source: None,
        }
    }

    fn mutual_pair() -> AttackGraph {
        let mut g = AttackGraph::new(vec![
            bare("x", ActType::Proposal, "safety"),
            bare("y", ActType::Proposal, "efficiency"),
        ])
        .unwrap();
        g.add_attack(AttackEdge::rule("x".into(), "y".into(), EdgeOrigin::Manual, ""));
        g.add_attack(AttackEdge::rule("y".into(), "x".into(), EdgeOrigin::Manual, ""));
        g
    }

    fn ids(s: &BTreeSet<ArgumentId>) -> Vec<&str> {
        s.iter().map(|a| a.as_str()).collect()
    }

    #[test]
    fn running_example_grounded() {
        let r = resolve(&running_graph(), &ResolutionConfig::grounded()).unwrap();
        assert_eq!(ids(&r.extension.members), ["a1", "a5", "a6"]);
        let acc: Vec<&str> = r.accepted_requirements.iter().map(|a| a.argument.as_str()).collect();
        assert_eq!(acc, ["a1", "a5", "a6"]);
        assert_eq!(r.preferred.len(), 1);
    }

    #[test]
    fn priority_picks_heavier_side() {
        let w = Weights::parse("safety=0.6,efficiency=0.4").unwrap();
        let r = resolve(&mutual_pair(), &ResolutionConfig::preferred(PreferredStrategy::PriorityGuided).with_weights(w)).unwrap();
        assert_eq!(ids(&r.extension.members), ["x"]);
        assert!(!r.priority.unwrap().tie);
    }

    #[test]
    fn priority_tie_falls_back_to_canonical_order() {
        let r = resolve(&mutual_pair(), &ResolutionConfig::preferred(PreferredStrategy::PriorityGuided)).unwrap();
        assert_eq!(ids(&r.extension.members), ["x"]);
        assert!(r.priority.unwrap().tie);
    }

    #[test]
    fn intersection_of_mutual_pair_is_empty() {
        let r = resolve(&mutual_pair(), &ResolutionConfig::preferred(PreferredStrategy::Intersection)).unwrap();
        assert!(r.extension.is_empty());
        assert!(r.accepted_requirements.is_empty());
    }

    #[test]
    fn missing_weight_is_a_config_error() {
        let w = Weights::parse("safety=1").unwrap();
        let err = resolve(&mutual_pair(), &ResolutionConfig::preferred(PreferredStrategy::PriorityGuided).with_weights(w));
        assert!(matches!(err, Err(ResolveError::MissingWeight(q)) if q.as_str() == "efficiency"));
    }

    #[test]
    fn critiques_never_become_requirements() {
        let mut g = AttackGraph::new(vec![bare("c", ActType::Critique, "safety"), bare("p", ActType::Proposal, "green")]).unwrap();
        g.add_attack(AttackEdge::rule("c".into(), "p".into(), EdgeOrigin::P1, ""));
        let r = resolve(&g, &ResolutionConfig::grounded()).unwrap();
        assert_eq!(ids(&r.extension.members), ["c"]);
        assert!(r.accepted_requirements.is_empty());
    }

    #[test]
    fn defense_chains_of_running_example() {
        let g = running_graph();
        let r = resolve(&g, &ResolutionConfig::grounded()).unwrap();
        assert!(r.defense_chains[&ArgumentId::from("a5")].steps.is_empty());
        let a1 = &r.defense_chains[&ArgumentId::from("a1")];
        let steps: Vec<(&str, Option<&str>)> = a1
            .steps
            .iter()
            .map(|s| (s.attacker.as_str(), s.defender.as_ref().map(|d| d.as_str())))
            .collect();
        assert_eq!(steps, [("a2", Some("a6")), ("a3", Some("a5"))]);
        assert!(r.defense_chains.values().all(DefenseChain::is_defended));
        assert!(matches!(
            defense_chain(&g, &r.extension.members, &"a2".into()),
            Err(ResolveError::NotInExtension(_))
        ));
    }

    #[test]
    fn acyclic_graph_preferred_equals_grounded() {
        let g = running_graph();
        let gr = resolve(&g, &ResolutionConfig::grounded()).unwrap();
        for s in [PreferredStrategy::Intersection, PreferredStrategy::PriorityGuided] {
            let p = resolve(&g, &ResolutionConfig::preferred(s)).unwrap();
            assert_eq!(p.extension.members, gr.extension.members);
        }
    }

    #[test]
    fn resolution_is_reproducible() {
        let g = running_graph();
        let a = serde_json::to_string(&resolve(&g, &ResolutionConfig::grounded()).unwrap()).unwrap();
        let b = serde_json::to_string(&resolve(&g, &ResolutionConfig::grounded()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn strategy_names() {
        assert_eq!("priority".parse::<PreferredStrategy>().unwrap(), PreferredStrategy::PriorityGuided);
        assert_eq!("priority-guided".parse::<PreferredStrategy>().unwrap(), PreferredStrategy::PriorityGuided);
        assert!("best".parse::<PreferredStrategy>().is_err());
    }
}
