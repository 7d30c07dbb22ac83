//! Artifact formats shared by the CLI and the service.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use reqarg_core::af::ArgumentId;
use reqarg_core::attack::{AttackEdge, EdgeOrigin};
use reqarg_core::graph::AttackGraph;
use reqarg_core::kaos::{Integration, KaosGraph};
use reqarg_core::log::Argument;
use reqarg_core::resolve::{JournalEntry, OverrideJournal, Resolution, ResolutionConfig};
use serde::{Deserialize, Serialize};

use crate::config::GatewayError;
use crate::run::RunOutput;

pub const GRAPH_FILE: &str = "argumentation_graph.json";
pub const KAOS_FILE: &str = "kaos_model.json";
pub const KAOS_XML_FILE: &str = "kaos_model.xml";
pub const CARDS_FILE: &str = "trace_cards.json";
pub const CARDS_MD_FILE: &str = "trace_cards.md";
pub const VERIFICATION_FILE: &str = "verification_report.json";
pub const STATS_FILE: &str = "run_stats.json";
pub const SWEEP_FILE: &str = "theta_sweep.json";
pub const LOG_FILE: &str = "negotiation_log.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackExport {
    pub attacker: ArgumentId,
    pub target: ArgumentId,
    pub origin: EdgeOrigin,
    pub confidence: f64,
    pub rationale: String,
}

impl From<&AttackEdge> for AttackExport {
    fn from(e: &AttackEdge) -> Self {
        Self {
            attacker: e.attacker.clone(),
            target: e.target.clone(),
            origin: e.origin,
            confidence: e.confidence,
            rationale: e.rationale.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphExport {
    pub arguments: Vec<Argument>,
    pub attacks: Vec<AttackExport>,
    pub grounded_extension: Vec<ArgumentId>,
    pub preferred_extensions: Vec<Vec<ArgumentId>>,
    pub selected_extension: Vec<ArgumentId>,
    pub config: ResolutionConfig,
    pub journal: Vec<JournalEntry>,
}

impl GraphExport {
    pub fn new(graph: &AttackGraph, resolution: &Resolution, journal: &OverrideJournal) -> Self {
        Self {
            arguments: graph.arguments.clone(),
            attacks: graph.attacks.iter().map(AttackExport::from).collect(),
            grounded_extension: resolution.grounded.iter().cloned().collect(),
            preferred_extensions: resolution.preferred.iter().map(|e| e.iter().cloned().collect()).collect(),
            selected_extension: resolution.extension.sorted_members(),
            config: resolution.config.clone(),
            journal: journal.entries().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KaosExport {
    #[serde(flatten)]
    pub model: KaosGraph,
    pub merges: Vec<reqarg_core::kaos::MergeRecord>,
    pub warnings: Vec<String>,
}

impl From<&Integration> for KaosExport {
    fn from(i: &Integration) -> Self {
        Self {
            model: i.model.clone(),
            merges: i.merges.clone(),
            warnings: i.warnings.clone(),
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
        .replace('\'', "&apos;")
}

/// One `<goal>` element per goal, children nested under their first parent.
/// Further parents are listed as `<also-refines>` references.
pub fn kaos_xml(model: &KaosGraph) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<goal-model>\n");
    let first_parent = |id: &str| model.parents(id).next().map(|l| l.parent.clone());
    let roots: Vec<&str> = model
        .goals
        .iter()
        .filter(|g| first_parent(&g.goal_id).is_none())
        .map(|g| g.goal_id.as_str())
        .collect();

    fn emit(model: &KaosGraph, id: &str, mode: Option<&str>, depth: usize, out: &mut String) {
        let Some(g) = model.goal(id) else { return };
        let pad = "  ".repeat(depth);
        let _ = write!(
            out,
            "{pad}<goal id=\"{}\" level=\"{}\" quality=\"{}\"",
            escape(&g.goal_id),
            g.level,
            escape(g.quality_dimension.as_str())
        );
        if let Some(m) = mode {
            let _ = write!(out, " refinement=\"{m}\"");
        }
        out.push_str(">\n");
        let _ = writeln!(out, "{pad}  <description>{}</description>", escape(&g.description));
        if !g.rationale.is_empty() {
            let _ = writeln!(out, "{pad}  <rationale>{}</rationale>", escape(&g.rationale));
        }
        for a in &g.provenance {
            let _ = writeln!(out, "{pad}  <provenance argument=\"{}\"/>", escape(a.as_str()));
        }
        for a in &g.merged_ancestors {
            let _ = writeln!(out, "{pad}  <merged-ancestor argument=\"{}\"/>", escape(a.as_str()));
        }
        for (i, l) in model.parents(id).enumerate() {
            if i > 0 {
                let _ = writeln!(out, "{pad}  <also-refines goal=\"{}\"/>", escape(&l.parent));
            }
        }
        for l in model.children(id) {
            if model.parents(&l.child).next().map(|p| p.parent.as_str()) == Some(id) {
                emit(model, &l.child, Some(&l.mode.to_string()), depth + 1, out);
            }
        }
        let _ = writeln!(out, "{pad}</goal>");
    }

    for r in roots {
        emit(model, r, None, 1, &mut out);
    }
    out.push_str("</goal-model>\n");
    out
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("export serializes");
    s.push('\n');
    s
}

fn write(dir: &Path, name: &str, body: &str, written: &mut Vec<PathBuf>) -> Result<(), GatewayError> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| GatewayError::Io {
        path: path.clone(),
        message: e.to_string(),
    })?;
    written.push(path);
    Ok(())
}

/// Writes every artifact of a run into `dir`, creating it if needed.
pub fn write_artifacts(dir: &Path, run: &RunOutput) -> Result<Vec<PathBuf>, GatewayError> {
    std::fs::create_dir_all(dir).map_err(|e| GatewayError::Io {
        path: dir.to_owned(),
        message: e.to_string(),
    })?;
    let mut written = Vec::new();
    write(dir, GRAPH_FILE, &pretty(&GraphExport::new(&run.graph, &run.resolution, &run.journal)), &mut written)?;
    write(dir, KAOS_FILE, &pretty(&KaosExport::from(&run.integration)), &mut written)?;
    write(dir, KAOS_XML_FILE, &kaos_xml(&run.integration.model), &mut written)?;
    write(dir, CARDS_FILE, &pretty(&run.cards), &mut written)?;
    let md: Vec<String> = run.cards.iter().map(|c| c.to_markdown()).collect();
    write(dir, CARDS_MD_FILE, &md.join("\n"), &mut written)?;
    write(dir, VERIFICATION_FILE, &pretty(&run.verification), &mut written)?;
    write(dir, STATS_FILE, &pretty(&run.stats), &mut written)?;
    if let Some(rows) = &run.sweep {
        write(dir, SWEEP_FILE, &pretty(rows), &mut written)?;
    }
    if matches!(run.config.input, crate::config::InputSource::Scenario(_)) {
        write(dir, LOG_FILE, &run.log.to_document(), &mut written)?;
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use reqarg_core::kaos::{GoalLevel, GoalNode, RefinementLink, RefinementMode};

    fn goal(id: &str, level: GoalLevel, text: &str) -> GoalNode {
        GoalNode {
            goal_id: id.into(),
            description: text.into(),
            quality_dimension: "safety".into(),
            level,
            rationale: String::new(),
            provenance: vec!["a1".into()],
            merged_ancestors: Vec::new(),
        }
    }

    #[test]
    fn xml_nests_and_escapes() {
        let model = KaosGraph {
            goals: vec![
                goal("SG1", GoalLevel::Strategic, "safe & sound"),
                goal("OG1", GoalLevel::Operational, "latency < 30 ms"),
            ],
            links: vec![RefinementLink {
                parent: "SG1".into(),
                child: "OG1".into(),
                mode: RefinementMode::And,
            }],
        };
        let xml = kaos_xml(&model);
        assert!(xml.contains("safe &amp; sound"));
        assert!(xml.contains("latency &lt; 30 ms"));
        let sg = xml.find("id=\"SG1\"").unwrap();
        let og = xml.find("id=\"OG1\"").unwrap();
        let close = xml.find("</goal>").unwrap();
        assert!(sg < og && og < close);
        assert!(xml.contains("refinement=\"AND\""));
    }
}
