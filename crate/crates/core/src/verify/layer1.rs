use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::graph::AttackGraph;
use crate::kaos::{GoalLevel, KaosGraph, RefinementMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    Schema,
    Dag,
    Refinement,
    RootConnectivity,
    CrossReference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub severity: Severity,
    /// A goal id, or `parent->child` for a link.
    pub subject: String,
    pub message: String,
}

fn v(rule: Rule, severity: Severity, subject: impl Into<String>, message: impl Into<String>) -> Violation {
    Violation {
        rule,
        severity,
        subject: subject.into(),
        message: message.into(),
    }
}

/// The five deterministic structural rules. Violations come back sorted by
/// rule, then subject.
pub fn layer1_structural_check(model: &KaosGraph, af_graph: &AttackGraph) -> Vec<Violation> {
    let mut out = Vec::new();
    let ids: BTreeSet<&str> = model.goals.iter().map(|g| g.goal_id.as_str()).collect();

    // schema
    let mut seen = BTreeSet::new();
    for g in &model.goals {
        let subject = if g.goal_id.trim().is_empty() { "<unnamed>" } else { g.goal_id.as_str() };
        for (field, value) in [
            ("goal_id", g.goal_id.as_str()),
            ("description", g.description.as_str()),
            ("quality_dimension", g.quality_dimension.as_str()),
            ("rationale", g.rationale.as_str()),
        ] {
            if value.trim().is_empty() {
                out.push(v(Rule::Schema, Severity::Error, subject, format!("missing {field}")));
            }
        }
        if !seen.insert(g.goal_id.as_str()) {
            out.push(v(Rule::Schema, Severity::Error, subject, "duplicate goal id"));
        }
    }
    for l in &model.links {
        for end in [&l.parent, &l.child] {
            if !ids.contains(end.as_str()) {
                out.push(v(
                    Rule::Schema,
                    Severity::Error,
                    format!("{}->{}", l.parent, l.child),
                    format!("link endpoint `{end}` is not a goal"),
                ));
            }
        }
    }

    // dag
    if let Some(cycle) = model.find_cycle() {
        let path: Vec<String> = cycle.iter().map(|(p, _)| p.clone()).collect();
        out.push(v(
            Rule::Dag,
            Severity::Error,
            path.first().cloned().unwrap_or_default(),
            format!("refinement cycle through {}", path.join(" -> ")),
        ));
    }

    // refinement
    let level: BTreeMap<&str, GoalLevel> = model.goals.iter().map(|g| (g.goal_id.as_str(), g.level)).collect();
    for g in &model.goals {
        let kids: Vec<_> = model.children(&g.goal_id).collect();
        if kids.is_empty() && g.level != GoalLevel::Operational {
            out.push(v(
                Rule::Refinement,
                Severity::Error,
                &g.goal_id,
                format!("leaf goal at {} level; leaves must be Operational", g.level),
            ));
        }
        if kids.len() == 1 && kids[0].mode == RefinementMode::And {
            out.push(v(Rule::Refinement, Severity::Warning, &g.goal_id, "single-child AND refinement"));
        }
    }
    for l in &model.links {
        let subject = format!("{}->{}", l.parent, l.child);
        if l.parent == l.child {
            out.push(v(Rule::Refinement, Severity::Error, subject, "goal refines itself"));
            continue;
        }
        let (Some(p), Some(c)) = (level.get(l.parent.as_str()), level.get(l.child.as_str())) else {
            continue;
        };
        match p.rank() as i8 - c.rank() as i8 {
            1 => {}
            d if d < 0 => out.push(v(Rule::Refinement, Severity::Error, subject, format!("{p} goal refined by a {c} goal"))),
            0 => out.push(v(Rule::Refinement, Severity::Warning, subject, format!("link stays at {p} level"))),
            _ => out.push(v(Rule::Refinement, Severity::Warning, subject, format!("{p} to {c} skips a level"))),
        }
    }

    // root connectivity
    let roots: Vec<&str> = model
        .goals
        .iter()
        .filter(|g| g.level == GoalLevel::Strategic)
        .map(|g| g.goal_id.as_str())
        .collect();
    if roots.is_empty() && !model.goals.is_empty() {
        out.push(v(Rule::RootConnectivity, Severity::Error, "<model>", "no Strategic root goal"));
    }
    let mut reached: BTreeSet<&str> = roots.iter().copied().collect();
    let mut queue: VecDeque<&str> = roots.iter().copied().collect();
    while let Some(n) = queue.pop_front() {
        for l in model.children(n) {
            if reached.insert(l.child.as_str()) {
                queue.push_back(l.child.as_str());
            }
        }
    }
    for g in &model.goals {
        if !reached.contains(g.goal_id.as_str()) && !roots.is_empty() {
            out.push(v(Rule::RootConnectivity, Severity::Error, &g.goal_id, "not reachable from a Strategic root"));
        }
    }

    // cross reference
    for g in &model.goals {
        for id in g.provenance.iter().chain(&g.merged_ancestors) {
            if !af_graph.contains(id) {
                out.push(v(
                    Rule::CrossReference,
                    Severity::Error,
                    &g.goal_id,
                    format!("argument {id} is not in the argumentation graph"),
                ));
            }
        }
    }

    out.sort_by(|a, b| (a.rule, &a.subject, &a.message).cmp(&(b.rule, &b.subject, &b.message)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kaos::{GoalNode, RefinementLink};
    use crate::log::ActType;
    use crate::resolve::tests::bare;

    fn goal(id: &str, level: GoalLevel) -> GoalNode {
        GoalNode {
            goal_id: id.into(),
            description: format!("goal {id}"),
            quality_dimension: "safety".into(),
            level,
            rationale: "because".into(),
            provenance: Vec::new(),
            merged_ancestors: Vec::new(),
        }
    }

    fn link(p: &str, c: &str) -> RefinementLink {
        RefinementLink {
            parent: p.into(),
            child: c.into(),
            mode: RefinementMode::And,
        }
    }

    fn af() -> AttackGraph {
        AttackGraph::new(vec![bare("a1", ActType::Proposal, "safety")]).unwrap()
    }

    /// Root with two tactical goals, each with two operational leaves.
    pub(crate) fn valid_model() -> KaosGraph {
        let mut goals = vec![goal("SG1", GoalLevel::Strategic), goal("TG1", GoalLevel::Tactical), goal("TG2", GoalLevel::Tactical)];
        for i in 1..=4 {
            let mut g = goal(&format!("OG{i}"), GoalLevel::Operational);
            g.provenance = vec!["a1".into()];
            goals.push(g);
        }
        KaosGraph {
            goals,
            links: vec![
                link("SG1", "TG1"),
                link("SG1", "TG2"),
                link("TG1", "OG1"),
                link("TG1", "OG2"),
                link("TG2", "OG3"),
                link("TG2", "OG4"),
            ],
        }
    }

    #[test]
    fn valid_model_is_clean() {
        assert!(layer1_structural_check(&valid_model(), &af()).is_empty());
    }

    #[test]
    fn empty_rationale_is_schema_error() {
        let mut m = valid_model();
        m.goals[3].rationale = " ".into();
        let vs = layer1_structural_check(&m, &af());
        assert_eq!(vs.len(), 1);
        assert_eq!((vs[0].rule, vs[0].severity), (Rule::Schema, Severity::Error));
    }

    #[test]
    fn single_child_and_is_a_warning() {
        let mut m = valid_model();
        m.links.retain(|l| l.child != "OG2");
        m.links.push(link("TG2", "OG2"));
        let vs = layer1_structural_check(&m, &af());
        assert!(vs.iter().all(|v| v.severity == Severity::Warning));
        assert!(vs.iter().any(|v| v.rule == Rule::Refinement && v.subject == "TG1"));
    }

    #[test]
    fn unknown_provenance_is_cross_reference_error() {
        let mut m = valid_model();
        m.goals[4].merged_ancestors.push("a99".into());
        let vs = layer1_structural_check(&m, &af());
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].rule, Rule::CrossReference);
        assert_eq!(vs[0].severity, Severity::Error);
    }

    #[test]
    fn cycle_is_dag_error() {
        let mut m = valid_model();
        m.links.push(link("OG1", "TG1"));
        let vs = layer1_structural_check(&m, &af());
        assert!(vs.iter().any(|v| v.rule == Rule::Dag && v.severity == Severity::Error));
    }

    #[test]
    fn unreachable_and_non_operational_leaf() {
        let mut m = valid_model();
        m.goals.push(goal("TG9", GoalLevel::Tactical));
        let vs = layer1_structural_check(&m, &af());
        let rules: BTreeSet<Rule> = vs.iter().map(|v| v.rule).collect();
        assert!(rules.contains(&Rule::Refinement));
        assert!(rules.contains(&Rule::RootConnectivity));
    }

    #[test]
    fn level_skip_and_inversion() {
        let mut m = valid_model();
        m.links.push(link("SG1", "OG1"));
        m.links.push(link("OG4", "TG1"));
        let vs = layer1_structural_check(&m, &af());
        assert!(vs.iter().any(|v| v.subject == "SG1->OG1" && v.severity == Severity::Warning));
        assert!(vs.iter().any(|v| v.subject == "OG4->TG1" && v.severity == Severity::Error));
    }
}
