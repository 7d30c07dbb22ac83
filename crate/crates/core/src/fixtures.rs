//! Bundled scenario documents, usable from tests, benches and the CLI.

/// Six-turn sensor-fusion latency negotiation with the pinned semantic edge.
pub const AD_SENSOR_FUSION: &str = include_str!("../fixtures/ad_sensor_fusion.json");
/// The same negotiation with rule-based edges only.
pub const AD_SENSOR_FUSION_RULE_ONLY: &str = include_str!("../fixtures/ad_sensor_fusion_rule_only.json");
/// Scripted agents that replay the sensor-fusion negotiation through the driver.
pub const AD_SCRIPTED_AGENTS: &str = include_str!("../fixtures/ad_scripted_agents.json");
/// Two sessions whose refinements compete for one compute budget.
pub const TWO_SESSION_OVERLAP: &str = include_str!("../fixtures/two_session_overlap.json");
/// Four sessions with two survivors each, for threshold sweeps.
pub const MULTI_SESSION_SWEEP: &str = include_str!("../fixtures/multi_session_sweep.json");
/// Goal decomposition of the sensor-fusion outcome into the three-level layout.
pub const AD_KAOS_HINTS: &str = include_str!("../fixtures/ad_kaos_hints.json");
/// Short reference passages for the grounding check.
pub const AD_CORPUS: &str = include_str!("../fixtures/ad_corpus.json");
/// Compliance clauses with applicability tags.
pub const AD_CLAUSES: &str = include_str!("../fixtures/ad_clauses.json");
