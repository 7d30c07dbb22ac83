//! The end-to-end pipeline: log, graph, optional semantic and arbitration
//! stages, resolution, goal model, verification and statistics.

use std::path::Path;

use reqarg_core::attack::{ArbitrationOutcome, SemanticOutcome};
use reqarg_core::driver::ScriptedScenario;
use reqarg_core::graph::AttackGraph;
use reqarg_core::kaos::{integrate, Integration, IntegrationInput, KaosGraph, KaosHints};
use reqarg_core::log::NegotiationLog;
use reqarg_core::metrics::{run_stats, RunStats};
use reqarg_core::pipeline::{add_arbitration, classify_survivors, theta_sweep, SweepRow};
use reqarg_core::providers::TokenCosine;
use reqarg_core::resolve::{resolve, trace_cards, OverrideJournal, Resolution, ResolveError, TraceCard};
use reqarg_core::verify::{
    content_digest, layer1_structural_check, verify, Clause, Compliance, HashedBagOfWords, Layer, OverlapEntailment,
    Passage, VerificationReport, VerifyInput,
};
use serde::de::DeserializeOwned;

use crate::config::{GatewayError, InputSource, PipelineConfig};

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: PipelineConfig,
    pub log: NegotiationLog,
    pub graph: AttackGraph,
    pub resolution: Resolution,
    pub journal: OverrideJournal,
    pub semantic: Option<SemanticOutcome>,
    pub arbitration: Option<ArbitrationOutcome>,
    pub integration: Integration,
    pub verification: VerificationReport,
    pub stats: RunStats,
    pub cards: Vec<TraceCard>,
    pub sweep: Option<Vec<SweepRow>>,
    pub warnings: Vec<String>,
}

/// Exit status when verification finds error-level structural violations.
pub const EXIT_BLOCKED: u8 = 3;

impl RunOutput {
    pub fn blocked(&self) -> bool {
        self.verification.blocked_at.is_some()
    }

    /// 0 for a clean run, [`EXIT_BLOCKED`] when verification stopped early.
    pub fn exit_status(&self) -> u8 {
        if self.blocked() {
            EXIT_BLOCKED
        } else {
            0
        }
    }
}

fn read(path: &Path) -> Result<String, GatewayError> {
    std::fs::read_to_string(path).map_err(|e| GatewayError::Io {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, GatewayError> {
    serde_json::from_str(&read(path)?).map_err(|e| GatewayError::Parse {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn resolve_error(e: ResolveError) -> GatewayError {
    match e {
        ResolveError::MissingWeight(_) => GatewayError::Usage(e.to_string()),
        other => GatewayError::Pipeline(other.to_string()),
    }
}

pub fn load_log(config: &PipelineConfig) -> Result<NegotiationLog, GatewayError> {
    let path = config.input.path();
    let doc = read(path)?;
    let parse = |message: String| GatewayError::Parse {
        path: path.to_owned(),
        message,
    };
    match &config.input {
        InputSource::Log(_) => NegotiationLog::parse(&doc).map_err(|e| parse(e.to_string())),
        InputSource::Scenario(_) => {
            let scenario = ScriptedScenario::parse(&doc).map_err(|e| parse(e.to_string()))?;
            scenario
                .run(&config.protocol, &TokenCosine)
                .map_err(|e| GatewayError::Pipeline(e.to_string()))
        }
    }
}

/// Layer 1 only, for runs without a reference corpus.
fn structural_only(model: &KaosGraph, graph: &AttackGraph, tau_h: f64) -> VerificationReport {
    let digest = content_digest(model);
    let violations = layer1_structural_check(model, graph);
    let mut report = VerificationReport {
        violations,
        hallucination_flags: Vec::new(),
        compliance: Compliance {
            note: Some("no corpus supplied; layers 2 and 3 not run".into()),
            ..Compliance::default()
        },
        blocked_at: None,
        tau_h,
        content_digest_before: digest.clone(),
        content_digest_after: digest,
        diagnostics: Vec::new(),
    };
    if report.has_errors() {
        report.blocked_at = Some(Layer::Layer2);
    }
    report
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<RunOutput, GatewayError> {
    config.validate()?;
    let log = load_log(config)?;
    let (mut graph, mut warnings) =
        AttackGraph::from_log(&log).map_err(|e| GatewayError::Pipeline(e.to_string()))?;

    let arbitration = if config.arbitration {
        let out = add_arbitration(&mut graph, &TokenCosine, config.tau)
            .map_err(|e| GatewayError::Pipeline(e.to_string()))?;
        warnings.extend(out.warnings.iter().cloned());
        Some(out)
    } else {
        None
    };

    let classifier = config.classifier.build(config.seed);
    let mut semantic = None;
    let mut sweep = None;
    if let Some(c) = &classifier {
        let out = classify_survivors(&graph, c.as_ref(), config.gate)
            .map_err(|e| GatewayError::Pipeline(e.to_string()))?;
        for s in &out.skipped {
            warnings.push(format!("pair ({}, {}) skipped: {}", s.first, s.second, s.reason));
        }
        if let Some(thetas) = &config.theta_sweep {
            let rows = theta_sweep(&graph, &out, thetas, &config.resolution).map_err(resolve_error)?;
            sweep = Some(rows);
        }
        graph.extend_attacks(out.edges.iter().cloned());
        semantic = Some(out);
    }

    let resolution = resolve(&graph, &config.resolution).map_err(resolve_error)?;
    let cards = trace_cards(&resolution, &graph).map_err(resolve_error)?;

    let hints: Option<KaosHints> = config.hints.as_deref().map(read_json).transpose()?;
    let integration = integrate(&IntegrationInput {
        project: &log.metadata.project,
        requirements: &resolution.accepted_requirements,
        graph: &graph,
        similarity: &TokenCosine,
        tau: config.tau,
        weights: &config.resolution.weights,
        hints: hints.as_ref(),
    })
    .map_err(|e| GatewayError::Pipeline(e.to_string()))?;
    warnings.extend(integration.warnings.iter().cloned());

    let verification = match &config.corpus {
        Some(path) => {
            let corpus: Vec<Passage> = read_json(path)?;
            let clauses: Vec<Clause> = config.clauses.as_deref().map(read_json).transpose()?.unwrap_or_default();
            verify(&VerifyInput {
                model: &integration.model,
                af_graph: &graph,
                accepted: &resolution.accepted_requirements,
                corpus: &corpus,
                clauses: &clauses,
                embedder: &HashedBagOfWords::default(),
                entailment: &OverlapEntailment::default(),
                tau_h: config.tau_h,
            })
            .map_err(|e| GatewayError::Usage(e.to_string()))?
        }
        None => structural_only(&integration.model, &graph, config.tau_h),
    };

    let graph_stats = graph
        .framework()
        .map_err(|e| GatewayError::Pipeline(e.to_string()))?
        .graph_stats(Some(&graph.labels()));
    let stats = run_stats(&resolution, &graph, &graph_stats, Some(&integration.model), &config.axes());

    Ok(RunOutput {
        config: config.clone(),
        log,
        graph,
        resolution,
        journal: OverrideJournal::new(),
        semantic,
        arbitration,
        integration,
        verification,
        stats,
        cards,
        sweep,
        warnings,
    })
}
