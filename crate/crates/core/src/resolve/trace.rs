use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{DefenseChain, Resolution, ResolveError};
use crate::af::{ArgumentId, Semantics};
use crate::attack::{AttackEdge, EdgeOrigin};
use crate::graph::AttackGraph;
use crate::log::ActType;
use crate::quality::QualityAxis;

/// Backward walk from `id` along P2 edges. Returns the chain (starting at
/// `id`) and any gaps that stop it reaching a proposal.
fn supersede_chain(graph: &AttackGraph, id: &ArgumentId) -> (Vec<ArgumentId>, Vec<String>) {
    let mut chain = vec![id.clone()];
    let mut gaps = Vec::new();
    let mut seen: BTreeSet<ArgumentId> = BTreeSet::from([id.clone()]);
    let mut cur = id.clone();
    loop {
        let Some(arg) = graph.argument(&cur) else {
            gaps.push(format!("{cur} is not in the graph"));
            break;
        };
        if arg.act == ActType::Proposal {
            break;
        }
        let mut p2: Vec<&ArgumentId> = graph
            .outgoing(&cur)
            .filter(|e| e.origin == EdgeOrigin::P2)
            .map(|e| &e.target)
            .collect();
        p2.sort();
        let Some(prev) = p2.first().map(|p| (*p).clone()) else {
            gaps.push(format!("{cur} ({}) supersedes nothing; no originating proposal", arg.act));
            break;
        };
        if !seen.insert(prev.clone()) {
            gaps.push(format!("supersedes cycle through {prev}"));
            break;
        }
        if !graph.contains(&prev) {
            gaps.push(format!("{cur} supersedes {prev}, which is not in the graph"));
            chain.push(prev);
            break;
        }
        chain.push(prev.clone());
        cur = prev;
    }
    (chain, gaps)
}

/// Critiques resolved by chain members that lack a P1 target in the chain.
fn resolution_gaps(graph: &AttackGraph, chain: &[ArgumentId]) -> Vec<String> {
    let members: BTreeSet<&ArgumentId> = chain.iter().collect();
    let mut gaps = Vec::new();
    for m in chain {
        for e in graph.outgoing(m).filter(|e| e.origin == EdgeOrigin::P3) {
            if !graph.contains(&e.target) {
                gaps.push(format!("{m} resolves {}, which is not in the graph", e.target));
                continue;
            }
            let anchored = graph
                .outgoing(&e.target)
                .any(|c| c.origin == EdgeOrigin::P1 && members.contains(&c.target) && graph.contains(&c.target));
            if !anchored {
                gaps.push(format!("critique {} resolved by {m} has no target in the trace", e.target));
            }
        }
    }
    gaps
}

fn trace_gaps(graph: &AttackGraph, id: &ArgumentId) -> (Vec<ArgumentId>, Vec<String>) {
    let (chain, mut gaps) = supersede_chain(graph, id);
    gaps.extend(resolution_gaps(graph, &chain));
    (chain, gaps)
}

/// Share of accepted requirements whose trace is complete: the supersedes
/// chain reaches a proposal through resolvable ids, and every critique a
/// chain member resolves targets something in the chain. `None` when there
/// are no accepted requirements.
pub fn trace_completeness(resolution: &Resolution, graph: &AttackGraph) -> Option<f64> {
    let total = resolution.accepted_requirements.len();
    if total == 0 {
        return None;
    }
    let complete = resolution
        .accepted_requirements
        .iter()
        .filter(|r| trace_gaps(graph, &r.argument).1.is_empty())
        .count();
    Some(complete as f64 / total as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardOrigin {
    pub argument: ArgumentId,
    pub act: ActType,
    pub agent: String,
    pub quality: QualityAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub session: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round: Option<u32>,
}

/// One labelled edge on a card, `from -> to`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub from: ArgumentId,
    pub to: ArgumentId,
    pub origin: EdgeOrigin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceCard {
    pub requirement: String,
    pub origin: CardOrigin,
    pub accepted_under: Vec<Semantics>,
    /// The accepted argument followed by the versions it supersedes.
    pub chain: Vec<ArgumentId>,
    pub steps: Vec<TraceStep>,
    pub gaps: Vec<String>,
    pub complete: bool,
    pub agents: BTreeMap<String, Vec<ArgumentId>>,
    pub qualities: BTreeMap<QualityAxis, Vec<ArgumentId>>,
    pub defense: DefenseChain,
}

impl TraceCard {
    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "### {}\n", self.origin.argument);
        let _ = writeln!(s, "**Requirement:** {}\n", self.requirement);
        let round = self.origin.round.map_or_else(|| "-".to_owned(), |r| r.to_string());
        let _ = writeln!(
            s,
            "**Origin:** {} by {} ({}), round {}\n",
            self.origin.act, self.origin.agent, self.origin.quality, round
        );
        let under: Vec<String> = self.accepted_under.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "**Accepted under:** {}\n", if under.is_empty() { "-".to_owned() } else { under.join(", ") });
        let chain: Vec<&str> = self.chain.iter().map(|a| a.as_str()).collect();
        let _ = writeln!(s, "**Chain:** {}\n", chain.join(" <- "));
        if self.steps.is_empty() {
            s.push_str("No attack relations involve this requirement.\n");
        } else {
            s.push_str("| from | to | pattern |\n|---|---|---|\n");
            for st in &self.steps {
                let _ = writeln!(s, "| {} | {} | {} |", st.from, st.to, st.origin);
            }
        }
        if !self.defense.steps.is_empty() {
            s.push_str("\n**Defence:**\n");
            for d in &self.defense.steps {
                let by = d.defender.as_ref().map_or("undefended", |x| x.as_str());
                let _ = writeln!(s, "- {} ({}) countered by {}", d.attacker, d.attack_origin, by);
            }
        }
        let agents: Vec<String> = self
            .agents
            .iter()
            .map(|(a, ids)| format!("{a} [{}]", ids.iter().map(|i| i.as_str()).collect::<Vec<_>>().join(", ")))
            .collect();
        let _ = writeln!(s, "\n**Agents:** {}", agents.join("; "));
        if !self.gaps.is_empty() {
            s.push_str("\n**Gaps:**\n");
            for g in &self.gaps {
                let _ = writeln!(s, "- {g}");
            }
        }
        s
    }
}

fn sorted(mut v: Vec<&AttackEdge>) -> Vec<&AttackEdge> {
    v.sort_by(|a, b| (&a.attacker, &a.target).cmp(&(&b.attacker, &b.target)));
    v
}

/// Trace card for the accepted requirement held by argument `id`.
///
/// Steps list, for each chain member, its supersedes edge, the critiques it
/// resolves and the attacks it receives from outside the chain, then the
/// remaining attacks on the critiques mentioned so far.
pub fn trace_card(resolution: &Resolution, graph: &AttackGraph, id: &ArgumentId) -> Result<TraceCard, ResolveError> {
    let req = resolution
        .accepted_requirements
        .iter()
        .find(|r| &r.argument == id)
        .ok_or_else(|| ResolveError::NotAccepted(id.clone()))?;
    let arg = graph.argument(id).ok_or_else(|| ResolveError::UnknownArgument(id.clone()))?;
    let (chain, gaps) = trace_gaps(graph, id);
    let in_chain: BTreeSet<&ArgumentId> = chain.iter().collect();

    let mut steps: Vec<TraceStep> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut push = |steps: &mut Vec<TraceStep>, from: &ArgumentId, to: &ArgumentId, origin| {
        if seen.insert((from.clone(), to.clone())) {
            steps.push(TraceStep {
                from: from.clone(),
                to: to.clone(),
                origin,
            });
        }
    };

    let mut critiques: Vec<ArgumentId> = Vec::new();
    for m in &chain {
        for e in sorted(graph.outgoing(m).filter(|e| e.origin == EdgeOrigin::P2).collect()) {
            push(&mut steps, &e.attacker, &e.target, e.origin);
        }
        for e in sorted(graph.outgoing(m).filter(|e| e.origin == EdgeOrigin::P3).collect()) {
            push(&mut steps, &e.attacker, &e.target, e.origin);
            critiques.push(e.target.clone());
        }
        for e in sorted(graph.incoming(m).filter(|e| !in_chain.contains(&e.attacker)).collect()) {
            push(&mut steps, &e.attacker, &e.target, e.origin);
            if graph.argument(&e.attacker).is_some_and(|a| a.act == ActType::Critique) {
                critiques.push(e.attacker.clone());
            }
        }
    }
    for c in &critiques {
        for e in sorted(graph.incoming(c).collect()) {
            push(&mut steps, &e.attacker, &e.target, e.origin);
        }
    }

    let mut involved: BTreeSet<&ArgumentId> = chain.iter().collect();
    for st in &steps {
        involved.insert(&st.from);
        involved.insert(&st.to);
    }
    let mut agents: BTreeMap<String, Vec<ArgumentId>> = BTreeMap::new();
    let mut qualities: BTreeMap<QualityAxis, Vec<ArgumentId>> = BTreeMap::new();
    for a in involved.iter().filter_map(|i| graph.argument(i)) {
        agents.entry(a.agent.clone()).or_default().push(a.id.clone());
        qualities.entry(a.quality.clone()).or_default().push(a.id.clone());
    }

    let status = resolution.status.get(id);
    let mut accepted_under = Vec::new();
    if status.is_some_and(|s| s.in_grounded) {
        accepted_under.push(Semantics::Grounded);
    }
    if status.is_some_and(|s| s.skeptically_preferred) {
        accepted_under.push(Semantics::Preferred);
    }

    Ok(TraceCard {
        requirement: req.content.clone(),
        origin: CardOrigin {
            argument: id.clone(),
            act: arg.act,
            agent: arg.agent.clone(),
            quality: arg.quality.clone(),
            session: arg.session().map(str::to_owned),
            round: arg.source.as_ref().map(|s| s.round),
        },
        accepted_under,
        complete: gaps.is_empty(),
        chain,
        steps,
        gaps,
        agents,
        qualities,
        defense: resolution.defense_chains.get(id).cloned().unwrap_or(DefenseChain {
            root: id.clone(),
            steps: Vec::new(),
        }),
    })
}

/// Cards for every accepted requirement, in canonical order.
pub fn trace_cards(resolution: &Resolution, graph: &AttackGraph) -> Result<Vec<TraceCard>, ResolveError> {
    resolution
        .accepted_requirements
        .iter()
        .map(|r| trace_card(resolution, graph, &r.argument))
        .collect()
}
