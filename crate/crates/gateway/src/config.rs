use std::path::{Path, PathBuf};

use reqarg_core::attack::{ConflictClassifier, GateConfig, SeededClassifier};
use reqarg_core::driver::ProtocolConfig;
use reqarg_core::quality::QualityAxis;
use reqarg_core::resolve::ResolutionConfig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Pipeline(String),
}

impl GatewayError {
    pub fn exit_code(&self) -> i32 {
        match self {
            GatewayError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "path", rename_all = "snake_case")]
pub enum InputSource {
    /// A recorded negotiation log.
    Log(PathBuf),
    /// Scripted agents replayed through the driver.
    Scenario(PathBuf),
}

impl InputSource {
    pub fn path(&self) -> &Path {
        match self {
            InputSource::Log(p) | InputSource::Scenario(p) => p,
        }
    }
}

/// The stub conflict classifier for cross-session pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    /// No semantic stage.
    Off,
    /// Seeded confidences in [0.5, 0.8).
    Conservative,
    /// Seeded confidences in [0.5, 0.9).
    Wide,
}

impl ClassifierKind {
    pub fn build(self, seed: u64) -> Option<Box<dyn ConflictClassifier>> {
        match self {
            ClassifierKind::Off => None,
            ClassifierKind::Conservative => Some(Box::new(SeededClassifier::conservative(seed))),
            ClassifierKind::Wide => Some(Box::new(SeededClassifier::new(seed, 0.5, 0.9))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: InputSource,
    pub gate: GateConfig,
    pub classifier: ClassifierKind,
    pub seed: u64,
    pub protocol: ProtocolConfig,
    pub resolution: ResolutionConfig,
    pub arbitration: bool,
    /// Overlap threshold for arbitration and near-duplicate goal merging.
    pub tau: f64,
    pub tau_h: f64,
    pub corpus: Option<PathBuf>,
    pub clauses: Option<PathBuf>,
    pub hints: Option<PathBuf>,
    pub theta_sweep: Option<Vec<f64>>,
}

impl PipelineConfig {
    pub fn new(input: InputSource) -> Self {
        Self {
            input,
            gate: GateConfig::default(),
            classifier: ClassifierKind::Conservative,
            seed: 101,
            protocol: ProtocolConfig::default(),
            resolution: ResolutionConfig::default(),
            arbitration: false,
            tau: 0.85,
            tau_h: reqarg_core::verify::DEFAULT_TAU_H,
            corpus: None,
            clauses: None,
            hints: None,
            theta_sweep: None,
        }
    }

    /// Quality axes the run reports on: those carrying a weight.
    pub fn axes(&self) -> Vec<QualityAxis> {
        self.resolution.weights.axes().cloned().collect()
    }

    pub fn validate(&self) -> Result<(), GatewayError> {
        let mut thresholds = vec![
            ("theta", self.gate.theta),
            ("theta-floor", self.gate.theta_floor),
            ("tau", self.tau),
            ("tau-h", self.tau_h),
        ];
        for t in self.theta_sweep.iter().flatten() {
            thresholds.push(("theta-sweep", *t));
        }
        for (name, v) in thresholds {
            if !(0.0..=1.0).contains(&v) {
                return Err(GatewayError::Usage(format!("--{name} must lie in [0, 1], got {v}")));
            }
        }
        if self.theta_sweep.is_some() && self.classifier == ClassifierKind::Off {
            return Err(GatewayError::Usage("--theta-sweep needs a classifier".into()));
        }
        let files = std::iter::once(self.input.path())
            .chain(self.corpus.as_deref())
            .chain(self.clauses.as_deref())
            .chain(self.hints.as_deref());
        for f in files {
            if !f.is_file() {
                return Err(GatewayError::Usage(format!("no such file: {}", f.display())));
            }
        }
        if self.clauses.is_some() && self.corpus.is_none() {
            return Err(GatewayError::Usage("--clauses needs --corpus".into()));
        }
        if let InputSource::Scenario(_) = self.input {
            // the scenario supplies the roster
            self.protocol
                .clone()
                .with_roster(vec!["scenario".to_owned()])
                .validate()
                .map_err(|e| GatewayError::Usage(e.to_string()))?;
        }
        Ok(())
    }
}
