use serde::{Deserialize, Serialize};

use super::{GoalLevel, KaosGraph};
use crate::quality::Weights;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepairAction {
    pub removed_parent: String,
    pub removed_child: String,
    /// Set when the child lost its last parent and was re-attached.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reattached_under: Option<String>,
}

/// Breaks every cycle by dropping, per cycle found, the edge whose child has
/// the lowest quality weight (ties: the larger goal id). A child left
/// without parents is hung under the first Strategic root again.
pub fn repair_cycles(graph: &KaosGraph, weights: &Weights) -> (KaosGraph, Vec<RepairAction>) {
    let mut g = graph.clone();
    let mut actions = Vec::new();
    while let Some(cycle) = g.find_cycle() {
        let weight = |child: &str| {
            g.goal(child)
                .and_then(|n| weights.get(&n.quality_dimension))
                .unwrap_or(0.0)
        };
        let (parent, child) = cycle
            .iter()
            .min_by(|(_, a), (_, b)| weight(a).total_cmp(&weight(b)).then_with(|| b.cmp(a)))
            .cloned()
            .expect("cycles are non-empty");
        g.links.retain(|l| !(l.parent == parent && l.child == child));

        let orphaned = g.goal(&child).is_some_and(|n| n.level != GoalLevel::Strategic)
            && g.parents(&child).next().is_none();
        let mut reattached_under = None;
        if orphaned {
            let before = g.links.len();
            g.enforce_levels();
            if g.links.len() > before {
                reattached_under = g.parents(&child).next().map(|l| l.parent.clone());
            }
        }
        actions.push(RepairAction {
            removed_parent: parent,
            removed_child: child,
            reattached_under,
        });
    }
    (g, actions)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{link, node};
    use super::*;

    fn base() -> KaosGraph {
        KaosGraph {
            goals: vec![
                node("SG1", GoalLevel::Strategic, "safety"),
                node("TA", GoalLevel::Tactical, "safety"),
                node("TB", GoalLevel::Tactical, "efficiency"),
                node("TC", GoalLevel::Tactical, "green"),
                node("OG1", GoalLevel::Operational, "safety"),
            ],
            links: vec![link("SG1", "TA"), link("TA", "OG1"), link("SG1", "TB"), link("SG1", "TC")],
        }
    }

    #[test]
    fn acyclic_graph_is_untouched() {
        let g = base();
        let (h, actions) = repair_cycles(&g, &Weights::uniform());
        assert_eq!(h, g);
        assert!(actions.is_empty());
    }

    #[test]
    fn two_cycle_with_equal_weights_drops_larger_child() {
        let mut g = base();
        g.links.push(link("TA", "TB"));
        g.links.push(link("TB", "TA"));
        let (h, actions) = repair_cycles(&g, &Weights::uniform());
        assert!(h.is_acyclic());
        assert_eq!(actions.len(), 1);
        assert_eq!((actions[0].removed_parent.as_str(), actions[0].removed_child.as_str()), ("TA", "TB"));
    }

    #[test]
    fn three_cycle_drops_lightest_child_edge() {
        let mut g = base();
        g.links.extend([link("TA", "TB"), link("TB", "TC"), link("TC", "TA")]);
        let w = Weights::parse("safety=0.5,efficiency=0.3,green=0.2").unwrap();
        let (h, actions) = repair_cycles(&g, &w);
        assert!(h.is_acyclic());
        assert_eq!(actions.len(), 1);
        assert_eq!(actions[0].removed_child, "TC");
        assert_eq!(actions[0].removed_parent, "TB");
    }

    #[test]
    fn orphan_is_reattached() {
        let mut g = KaosGraph {
            goals: vec![
                node("SG1", GoalLevel::Strategic, "safety"),
                node("TA", GoalLevel::Tactical, "safety"),
                node("TB", GoalLevel::Tactical, "green"),
            ],
            links: vec![link("SG1", "TA"), link("TA", "TB"), link("TB", "TA")],
        };
        g.goals.push(node("OG1", GoalLevel::Operational, "safety"));
        g.links.push(link("TA", "OG1"));
        g.links.push(link("TB", "OG1"));
        let w = Weights::parse("safety=0.8,green=0.2").unwrap();
        let (h, actions) = repair_cycles(&g, &w);
        assert!(h.is_acyclic());
        assert_eq!(actions[0].removed_child, "TB");
        assert_eq!(actions[0].reattached_under.as_deref(), Some("SG1"));
    }
}
