use std::path::PathBuf;

use clap::Parser;
use reqarg_core::af::Semantics;
use reqarg_core::attack::GateConfig;
use reqarg_core::quality::Weights;
use reqarg_core::resolve::{PreferredStrategy, ResolutionConfig};

use crate::config::{ClassifierKind, GatewayError, InputSource, PipelineConfig};

#[derive(Debug, Parser)]
#[command(name = "reqarg", version, about = "Resolve requirement negotiations with abstract argumentation")]
pub struct Args {
    /// Negotiation log (JSON).
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    pub input: Option<PathBuf>,
    /// Scripted-agent scenario to replay through the driver (JSON).
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long, default_value = "grounded")]
    pub semantics: Semantics,
    /// `intersection` or `priority`.
    #[arg(long, default_value = "intersection")]
    pub preferred_strategy: PreferredStrategy,
    /// Priority weights as `axis=value,...`, summing to 1.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long, default_value_t = 0.7)]
    pub theta: f64,
    #[arg(long, default_value_t = 0.85)]
    pub theta_floor: f64,
    /// Effective thresholds to sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub theta_sweep: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "conservative")]
    pub classifier: ClassifierKind,
    /// Run one cross-session arbitration round.
    #[arg(long)]
    pub arbitration: bool,
    /// Overlap threshold for arbitration and goal merging.
    #[arg(long, default_value_t = 0.85)]
    pub tau: f64,
    /// Grounding threshold for the hallucination check.
    #[arg(long, default_value_t = 0.60)]
    pub tau_h: f64,
    #[arg(long, default_value_t = 101)]
    pub seed: u64,
    /// Reference passages for verification (JSON list).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Compliance clauses (JSON list).
    #[arg(long)]
    pub clauses: Option<PathBuf>,
    /// Goal decomposition hints (JSON).
    #[arg(long)]
    pub hints: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Serve the what-if API after the run instead of exiting.
    #[arg(long)]
    pub serve: bool,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
}

impl Args {
    pub fn pipeline_config(&self) -> Result<PipelineConfig, GatewayError> {
        let input = match (&self.input, &self.scenario) {
            (Some(p), None) => InputSource::Log(p.clone()),
            (None, Some(p)) => InputSource::Scenario(p.clone()),
            _ => return Err(GatewayError::Usage("give exactly one of --input or --scenario".into())),
        };
        let weights = match &self.weights {
            Some(w) => Weights::parse(w).map_err(|e| GatewayError::Usage(e.to_string()))?,
            None => Weights::uniform(),
        };
        let mut cfg = PipelineConfig::new(input);
        cfg.gate = GateConfig::new(self.theta, self.theta_floor).map_err(|e| GatewayError::Usage(e.to_string()))?;
        cfg.classifier = self.classifier;
        cfg.seed = self.seed;
        cfg.resolution = ResolutionConfig {
            semantics: self.semantics,
            preferred_strategy: self.preferred_strategy,
            weights,
        };
        cfg.arbitration = self.arbitration;
        cfg.tau = self.tau;
        cfg.tau_h = self.tau_h;
        cfg.corpus = self.corpus.clone();
        cfg.clauses = self.clauses.clone();
        cfg.hints = self.hints.clone();
        cfg.theta_sweep = self.theta_sweep.clone();
        Ok(cfg)
    }
}
