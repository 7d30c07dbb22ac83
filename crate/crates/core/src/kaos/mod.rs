//! KAOS goal model built from the accepted requirements.

mod integrate;
mod repair;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::af::ArgumentId;
use crate::quality::QualityAxis;

pub use integrate::{integrate, Integration, IntegrationInput, KaosHints, MergeKind, MergeRecord};
pub use repair::{repair_cycles, RepairAction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum GoalLevel {
    Operational,
    Tactical,
    Strategic,
}

impl GoalLevel {
    /// 3 for Strategic down to 1 for Operational.
    pub fn rank(self) -> u8 {
        match self {
            GoalLevel::Strategic => 3,
            GoalLevel::Tactical => 2,
            GoalLevel::Operational => 1,
        }
    }
}

impl fmt::Display for GoalLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GoalLevel::Strategic => "Strategic",
            GoalLevel::Tactical => "Tactical",
            GoalLevel::Operational => "Operational",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RefinementMode {
    #[default]
    #[serde(rename = "AND")]
    And,
    #[serde(rename = "OR")]
    Or,
}

impl fmt::Display for RefinementMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RefinementMode::And => "AND",
            RefinementMode::Or => "OR",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalNode {
    pub goal_id: String,
    pub description: String,
    pub quality_dimension: QualityAxis,
    pub level: GoalLevel,
    pub rationale: String,
    #[serde(default)]
    pub provenance: Vec<ArgumentId>,
    #[serde(default)]
    pub merged_ancestors: Vec<ArgumentId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefinementLink {
    pub parent: String,
    pub child: String,
    #[serde(default)]
    pub mode: RefinementMode,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KaosGraph {
    pub goals: Vec<GoalNode>,
    pub links: Vec<RefinementLink>,
}

impl KaosGraph {
    pub fn goal(&self, id: &str) -> Option<&GoalNode> {
        self.goals.iter().find(|g| g.goal_id == id)
    }

    pub fn children<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a RefinementLink> + 'a {
        self.links.iter().filter(move |l| l.parent == id)
    }

    pub fn parents<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a RefinementLink> + 'a {
        self.links.iter().filter(move |l| l.child == id)
    }

    pub fn count_level(&self, level: GoalLevel) -> usize {
        self.goals.iter().filter(|g| g.level == level).count()
    }

    pub fn strategic_roots(&self) -> Vec<&GoalNode> {
        self.goals.iter().filter(|g| g.level == GoalLevel::Strategic).collect()
    }

    /// Edges of some directed cycle, or `None` if the links form a DAG.
    /// Deterministic for a given goal and link order.
    pub fn find_cycle(&self) -> Option<Vec<(String, String)>> {
        let ids: Vec<&str> = self.goals.iter().map(|g| g.goal_id.as_str()).collect();
        let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for l in &self.links {
            adj.entry(l.parent.as_str()).or_default().push(l.child.as_str());
        }
        // 0 unvisited, 1 on stack, 2 done
        let mut color: BTreeMap<&str, u8> = BTreeMap::new();
        let mut nodes: Vec<&str> = ids.clone();
        nodes.extend(self.links.iter().flat_map(|l| [l.parent.as_str(), l.child.as_str()]));
        for &start in &nodes {
            if color.get(start).copied().unwrap_or(0) != 0 {
                continue;
            }
            let mut stack: Vec<(&str, usize)> = vec![(start, 0)];
            color.insert(start, 1);
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                let succ = adj.get(node).map_or(&[][..], |v| v.as_slice());
                if *next < succ.len() {
                    let child = succ[*next];
                    *next += 1;
                    match color.get(child).copied().unwrap_or(0) {
                        0 => {
                            color.insert(child, 1);
                            stack.push((child, 0));
                        }
                        1 => {
                            let pos = stack.iter().position(|(n, _)| *n == child).expect("on stack");
                            let mut cycle: Vec<(String, String)> = stack[pos..]
                                .windows(2)
                                .map(|w| (w[0].0.to_owned(), w[1].0.to_owned()))
                                .collect();
                            cycle.push((node.to_owned(), child.to_owned()));
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    color.insert(node, 2);
                    stack.pop();
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// Every argument id named in provenance or merged ancestors.
    pub fn traced_arguments(&self) -> BTreeSet<ArgumentId> {
        self.goals
            .iter()
            .flat_map(|g| g.provenance.iter().chain(&g.merged_ancestors))
            .cloned()
            .collect()
    }

    fn next_id(&self, prefix: &str) -> String {
        let n = self
            .goals
            .iter()
            .filter_map(|g| g.goal_id.strip_prefix(prefix)?.parse::<usize>().ok())
            .max()
            .unwrap_or(0);
        format!("{prefix}{}", n + 1)
    }

    fn link(&mut self, parent: &str, child: &str) {
        if !self.links.iter().any(|l| l.parent == parent && l.child == child) {
            self.links.push(RefinementLink {
                parent: parent.to_owned(),
                child: child.to_owned(),
                mode: RefinementMode::And,
            });
        }
    }

    fn bridge_goal(&mut self, root: &str, quality: &QualityAxis) -> String {
        let existing = self
            .goals
            .iter()
            .filter(|g| g.level == GoalLevel::Tactical && &g.quality_dimension == quality)
            .find(|g| self.links.iter().any(|l| l.parent == root && l.child == g.goal_id))
            .map(|g| g.goal_id.clone());
        if let Some(id) = existing {
            return id;
        }
        let id = self.next_id("TG");
        self.goals.push(GoalNode {
            goal_id: id.clone(),
            description: format!("Meet the {quality} concerns of the accepted requirements"),
            quality_dimension: quality.clone(),
            level: GoalLevel::Tactical,
            rationale: "inserted to bridge a Strategic goal to its Operational goals".to_owned(),
            provenance: Vec::new(),
            merged_ancestors: Vec::new(),
        });
        self.link(root, &id);
        id
    }

    /// Replaces Strategic to Operational links with a Tactical bridge and
    /// hangs parentless non-Strategic goals under the first Strategic root.
    /// Returns a note per change.
    pub fn enforce_levels(&mut self) -> Vec<String> {
        let mut notes = Vec::new();
        let skips: Vec<RefinementLink> = self
            .links
            .iter()
            .filter(|l| {
                self.goal(&l.parent).map(|g| g.level) == Some(GoalLevel::Strategic)
                    && self.goal(&l.child).map(|g| g.level) == Some(GoalLevel::Operational)
            })
            .cloned()
            .collect();
        for l in skips {
            self.links.retain(|x| x != &l);
            let q = self.goal(&l.child).expect("checked").quality_dimension.clone();
            let t = self.bridge_goal(&l.parent, &q);
            self.link(&t, &l.child);
            notes.push(format!("bridged {} -> {} through {t}", l.parent, l.child));
        }

        let Some(root) = self.strategic_roots().first().map(|g| g.goal_id.clone()) else {
            return notes;
        };
        let orphans: Vec<(String, GoalLevel, QualityAxis)> = self
            .goals
            .iter()
            .filter(|g| g.level != GoalLevel::Strategic && self.parents(&g.goal_id).next().is_none())
            .map(|g| (g.goal_id.clone(), g.level, g.quality_dimension.clone()))
            .collect();
        for (id, level, q) in orphans {
            match level {
                GoalLevel::Tactical => {
                    self.link(&root, &id);
                    notes.push(format!("attached {id} under {root}"));
                }
                GoalLevel::Operational => {
                    let t = self.bridge_goal(&root, &q);
                    self.link(&t, &id);
                    notes.push(format!("attached {id} under {root} through {t}"));
                }
                GoalLevel::Strategic => unreachable!(),
            }
        }
        notes
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn node(id: &str, level: GoalLevel, quality: &str) -> GoalNode {
        GoalNode {
            goal_id: id.into(),
            description: format!("goal {id}"),
            quality_dimension: quality.into(),
            level,
            rationale: "r".into(),
            provenance: Vec::new(),
            merged_ancestors: Vec::new(),
        }
    }

    pub(crate) fn link(p: &str, c: &str) -> RefinementLink {
        RefinementLink {
            parent: p.into(),
            child: c.into(),
            mode: RefinementMode::And,
        }
    }

    #[test]
    fn cycle_detection() {
        let mut g = KaosGraph {
            goals: vec![node("A", GoalLevel::Tactical, "safety"), node("B", GoalLevel::Tactical, "safety")],
            links: vec![link("A", "B")],
        };
        assert!(g.is_acyclic());
        g.links.push(link("B", "A"));
        let c = g.find_cycle().unwrap();
        assert_eq!(c.len(), 2);
        g.links = vec![link("A", "A")];
        assert_eq!(g.find_cycle().unwrap(), vec![("A".to_owned(), "A".to_owned())]);
    }

    #[test]
    fn strategic_to_operational_gets_bridged() {
        let mut g = KaosGraph {
            goals: vec![node("SG1", GoalLevel::Strategic, "safety"), node("OG1", GoalLevel::Operational, "green")],
            links: vec![link("SG1", "OG1")],
        };
        let notes = g.enforce_levels();
        assert_eq!(notes.len(), 1);
        assert_eq!(g.count_level(GoalLevel::Tactical), 1);
        assert_eq!(g.links.len(), 2);
        assert!(g.links.contains(&link("SG1", "TG1")));
        assert!(g.links.contains(&link("TG1", "OG1")));
    }

    #[test]
    fn orphans_are_attached() {
        let mut g = KaosGraph {
            goals: vec![
                node("SG1", GoalLevel::Strategic, "safety"),
                node("TG1", GoalLevel::Tactical, "green"),
                node("OG1", GoalLevel::Operational, "green"),
            ],
            links: vec![],
        };
        g.enforce_levels();
        assert!(g.links.contains(&link("SG1", "TG1")));
        assert!(g.links.contains(&link("TG1", "OG1")));
    }

    #[test]
    fn serde_labels() {
        let v = serde_json::to_value(link("a", "b")).unwrap();
        assert_eq!(v["mode"], "AND");
        let n = serde_json::to_value(node("x", GoalLevel::Strategic, "safety")).unwrap();
        assert_eq!(n["level"], "Strategic");
    }
}
