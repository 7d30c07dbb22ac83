use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{AttackEdge, EdgeOrigin};
use crate::af::ArgumentId;
use crate::log::{ActType, Argument, ArgumentSet, NegotiationLog};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleAttacks {
    pub edges: Vec<AttackEdge>,
    pub warnings: Vec<String>,
}

/// Derives P1/P2/P3 edges from the explicit turn references.
///
/// References are intra-session by log validation, so no rule edge ever
/// crosses sessions.
pub fn rule_based_attacks(args: &ArgumentSet, log: &NegotiationLog) -> RuleAttacks {
    let mut out = RuleAttacks::default();
    let mut seen = BTreeSet::new();
    let mut push = |out: &mut RuleAttacks, e: AttackEdge| {
        if seen.insert((e.attacker.clone(), e.target.clone())) {
            out.edges.push(e);
        }
    };

    for turn in log.turns() {
        let Some(me) = args.for_turn(&turn.reference()) else {
            continue;
        };
        let resolve = |r| {
            let id = args.for_turn(r)?;
            Some((id.clone(), args.get(id)?))
        };

        for r in &turn.targets {
            let Some((target, t)) = resolve(r) else { continue };
            if t.act == ActType::Critique {
                out.warnings
                    .push(format!("{me}: P1 target {target} is a critique, not a proposal"));
            }
            push(&mut out, AttackEdge::rule(me.clone(), target, EdgeOrigin::P1, "critique rejects the referenced proposal"));
        }

        if let Some(r) = &turn.supersedes {
            if let Some((target, t)) = resolve(r) {
                if t.agent == turn.agent {
                    push(&mut out, AttackEdge::rule(me.clone(), target, EdgeOrigin::P2, "refinement supersedes an earlier version"));
                } else {
                    out.warnings.push(format!(
                        "{me}: supersedes {target} from a different agent ({}); no P2 edge",
                        t.agent
                    ));
                }
            }
        }

        for r in &turn.resolves {
            let Some((target, t)) = resolve(r) else { continue };
            if t.act != ActType::Critique {
                out.warnings
                    .push(format!("{me}: resolves {target}, which is not a critique"));
            }
            push(&mut out, AttackEdge::rule(me.clone(), target, EdgeOrigin::P3, "refinement resolves the critique"));
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Survivors {
    pub members: Vec<ArgumentId>,
    /// Set when no argument was undefeated and the latest refinement stood in.
    pub fallback: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Proposal/refinement arguments of `session` with no incoming rule-based
/// edge from inside the session. When every candidate is attacked, the latest
/// refinement (highest round, then turn index) represents the session.
pub fn session_survivors(args: &[Argument], rule_edges: &[AttackEdge], session: &str) -> Survivors {
    let in_session: Vec<&Argument> = args.iter().filter(|a| a.session() == Some(session)).collect();
    let ids: BTreeSet<&ArgumentId> = in_session.iter().map(|a| &a.id).collect();
    let attacked: BTreeSet<&ArgumentId> = rule_edges
        .iter()
        .filter(|e| e.origin.is_rule_based() && ids.contains(&e.attacker) && ids.contains(&e.target))
        .map(|e| &e.target)
        .collect();

    let candidates: Vec<&Argument> = in_session.into_iter().filter(|a| a.act.is_requirement()).collect();
    if candidates.is_empty() {
        return Survivors {
            warning: Some(format!("session `{session}` has no proposal or refinement")),
            ..Survivors::default()
        };
    }

    let members: Vec<ArgumentId> = candidates
        .iter()
        .filter(|a| !attacked.contains(&a.id))
        .map(|a| a.id.clone())
        .collect();
    if !members.is_empty() {
        return Survivors {
            members,
            ..Survivors::default()
        };
    }

    let latest = candidates
        .iter()
        .filter(|a| a.act == ActType::Refinement)
        .max_by_key(|a| a.source.as_ref().map(|s| (s.round, s.turn_index)));
    match latest {
        Some(a) => Survivors {
            members: vec![a.id.clone()],
            fallback: true,
            warning: None,
        },
        None => Survivors {
            members: Vec::new(),
            fallback: true,
            warning: Some(format!("session `{session}`: every proposal is defeated and no refinement exists")),
        },
    }
}
