use serde::{Deserialize, Serialize};

use super::{resolve, Resolution, ResolutionConfig, ResolveError};
use crate::af::ArgumentId;
use crate::attack::AttackEdge;
use crate::graph::{AttackGraph, GraphError};
use crate::log::Argument;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "operation", rename_all = "snake_case")]
pub enum Operation {
    RemoveAttack { attacker: ArgumentId, target: ArgumentId },
    InjectArgument { argument: Argument, edges: Vec<AttackEdge> },
    Reconfigure { config: ResolutionConfig },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JournalEntry {
    /// Position in the journal, starting at 1.
    pub seq: u64,
    /// Wall-clock time if the caller supplied one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    #[serde(flatten)]
    pub operation: Operation,
}

/// Append-only record of human overrides.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OverrideJournal {
    entries: Vec<JournalEntry>,
}

impl OverrideJournal {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, operation: Operation, timestamp: Option<String>) -> &JournalEntry {
        let seq = self.entries.len() as u64 + 1;
        self.entries.push(JournalEntry {
            seq,
            timestamp,
            operation,
        });
        self.entries.last().expect("just pushed")
    }

    pub fn entries(&self) -> &[JournalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Drops one attack and re-solves. The input graph is left alone; the new
/// graph is returned with its resolution.
pub fn what_if_remove_attack(
    graph: &AttackGraph,
    attacker: &ArgumentId,
    target: &ArgumentId,
    config: &ResolutionConfig,
    journal: &mut OverrideJournal,
) -> Result<(AttackGraph, Resolution), ResolveError> {
    let next = graph.without_attack(attacker, target)?;
    let resolution = resolve(&next, config)?;
    journal.record(
        Operation::RemoveAttack {
            attacker: attacker.clone(),
            target: target.clone(),
        },
        None,
    );
    Ok((next, resolution))
}

/// Adds a stakeholder argument with its attacks and re-solves.
pub fn what_if_inject(
    graph: &AttackGraph,
    argument: Argument,
    edges: Vec<AttackEdge>,
    config: &ResolutionConfig,
    journal: &mut OverrideJournal,
) -> Result<(AttackGraph, Resolution), ResolveError> {
    let mut next = graph.clone();
    next.add_argument(argument.clone())?;
    for e in &edges {
        if !next.contains(&e.attacker) || !next.contains(&e.target) {
            return Err(GraphError::DanglingEdge(e.attacker.clone(), e.target.clone()).into());
        }
        if !next.add_attack(e.clone()) {
            return Err(GraphError::DuplicateEdge(e.attacker.clone(), e.target.clone()).into());
        }
    }
    let resolution = resolve(&next, config)?;
    journal.record(Operation::InjectArgument { argument, edges }, None);
    Ok((next, resolution))
}

/// Re-solves the same graph under another configuration.
pub fn what_if_reconfigure(
    graph: &AttackGraph,
    config: &ResolutionConfig,
    journal: &mut OverrideJournal,
) -> Result<Resolution, ResolveError> {
    let resolution = resolve(graph, config)?;
    journal.record(Operation::Reconfigure { config: config.clone() }, None);
    Ok(resolution)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{bare, running_graph};
    use super::*;
    use crate::attack::EdgeOrigin;
    use crate::log::ActType;

    fn members(r: &Resolution) -> Vec<&str> {
        r.extension.members.iter().map(|a| a.as_str()).collect()
    }

    #[test]
    fn reconfigure_is_journaled() {
        let g = running_graph();
        let mut j = OverrideJournal::new();
        let cfg = ResolutionConfig::preferred(crate::resolve::PreferredStrategy::Intersection);
        let r = what_if_reconfigure(&g, &cfg, &mut j).unwrap();
        assert_eq!(members(&r), ["a1", "a5", "a6"]);
        assert!(matches!(j.entries()[0].operation, Operation::Reconfigure { .. }));
    }

    #[test]
    fn removing_the_semantic_edge_flips_acceptance() {
        let g = running_graph();
        let before = serde_json::to_string(&g).unwrap();
        let mut j = OverrideJournal::new();
        let (h, r) = what_if_remove_attack(&g, &"a6".into(), &"a2".into(), &ResolutionConfig::grounded(), &mut j).unwrap();
        assert_eq!(members(&r), ["a2", "a5", "a6"]);
        assert_eq!(h.attacks.len(), 6);
        assert_eq!(serde_json::to_string(&g).unwrap(), before);
        assert_eq!(j.len(), 1);
        assert_eq!(j.entries()[0].seq, 1);
    }

    #[test]
    fn removing_unknown_edge_fails_without_journal_entry() {
        let mut j = OverrideJournal::new();
        let err = what_if_remove_attack(&running_graph(), &"a1".into(), &"a6".into(), &ResolutionConfig::grounded(), &mut j);
        assert!(matches!(err, Err(ResolveError::Graph(GraphError::UnknownEdge(..)))));
        assert!(j.is_empty());
    }

    #[test]
    fn removing_the_only_attack_accepts_both() {
        let mut g = AttackGraph::new(vec![bare("x", ActType::Proposal, "safety"), bare("y", ActType::Proposal, "green")]).unwrap();
        g.add_attack(AttackEdge::rule("x".into(), "y".into(), EdgeOrigin::Manual, ""));
        let (_, r) = what_if_remove_attack(&g, &"x".into(), &"y".into(), &ResolutionConfig::grounded(), &mut OverrideJournal::new()).unwrap();
        assert_eq!(members(&r), ["x", "y"]);
    }

    #[test]
    fn injected_regulation_defeats_a5() {
        let reg = bare("a7", ActType::Critique, "responsibility");
        let edge = AttackEdge::rule("a7".into(), "a5".into(), EdgeOrigin::Manual, "regulatory constraint");
        let mut j = OverrideJournal::new();
        let (_, r) = what_if_inject(&running_graph(), reg, vec![edge], &ResolutionConfig::grounded(), &mut j).unwrap();
        assert!(!r.extension.contains(&"a5".into()));
        assert!(r.extension.contains(&"a7".into()));
        assert!(matches!(j.entries()[0].operation, Operation::InjectArgument { .. }));
    }

    #[test]
    fn isolated_injection_joins_every_extension() {
        let (_, r) = what_if_inject(
            &running_graph(),
            bare("a7", ActType::Proposal, "green"),
            vec![],
            &ResolutionConfig::grounded(),
            &mut OverrideJournal::new(),
        )
        .unwrap();
        assert_eq!(members(&r), ["a1", "a5", "a6", "a7"]);
        assert!(r.preferred.iter().all(|e| e.contains(&"a7".into())));
    }

    #[test]
    fn injected_argument_attacked_by_the_extension_is_rejected() {
        let edge = AttackEdge::rule("a5".into(), "a7".into(), EdgeOrigin::Manual, "");
        let (_, r) = what_if_inject(
            &running_graph(),
            bare("a7", ActType::Proposal, "green"),
            vec![edge],
            &ResolutionConfig::grounded(),
            &mut OverrideJournal::new(),
        )
        .unwrap();
        assert_eq!(members(&r), ["a1", "a5", "a6"]);
    }

    #[test]
    fn id_collision_is_rejected() {
        let err = what_if_inject(
            &running_graph(),
            bare("a3", ActType::Proposal, "green"),
            vec![],
            &ResolutionConfig::grounded(),
            &mut OverrideJournal::new(),
        );
        assert!(matches!(err, Err(ResolveError::Graph(GraphError::DuplicateArgument(_)))));
    }

    #[test]
    fn journal_serializes_flat() {
        let mut j = OverrideJournal::new();
        j.record(
            Operation::RemoveAttack {
                attacker: "a6".into(),
                target: "a2".into(),
            },
            Some("2026-01-01T00:00:00Z".into()),
        );
        let v = serde_json::to_value(&j).unwrap();
        assert_eq!(v[0]["operation"], "remove_attack");
        assert_eq!(v[0]["attacker"], "a6");
        let back: OverrideJournal = serde_json::from_value(v).unwrap();
        assert_eq!(back, j);
    }
}
