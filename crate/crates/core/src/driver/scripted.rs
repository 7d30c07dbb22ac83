use serde::{Deserialize, Serialize};

use super::{run_negotiation, Agent, AgentContext, AgentMove, DriverError, ProtocolConfig};
use crate::log::{ActType, NegotiationLog, TurnStatus};
use crate::providers::{ProviderError, SimilarityProvider};
use crate::quality::QualityAxis;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptEntry {
    pub round: u32,
    pub act: ActType,
    pub content: String,
    #[serde(default)]
    pub rationale: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<TurnStatus>,
}

/// Replays a fixed turn per round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedAgent {
    pub name: String,
    pub quality_dimension: QualityAxis,
    pub script: Vec<ScriptEntry>,
}

impl Agent for ScriptedAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn quality(&self) -> QualityAxis {
        self.quality_dimension.clone()
    }

    fn act(&self, ctx: &AgentContext<'_>) -> Result<AgentMove, ProviderError> {
        let e = self
            .script
            .iter()
            .find(|e| e.round == ctx.round)
            .ok_or_else(|| ProviderError::new(&self.name, format!("script has no turn for round {}", ctx.round)))?;
        Ok(AgentMove {
            act: e.act,
            content: e.content.clone(),
            rationale: e.rationale.clone(),
            status: e.status,
        })
    }
}

/// A scripted-agent definition file: the project, the session id and the
/// agents in roster order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedScenario {
    pub project: String,
    pub session_id: String,
    pub agents: Vec<ScriptedAgent>,
}

impl ScriptedScenario {
    pub fn parse(document: &str) -> Result<Self, DriverError> {
        let sc: Self = serde_json::from_str(document).map_err(|e| DriverError::Scenario(e.to_string()))?;
        if sc.agents.is_empty() {
            return Err(DriverError::EmptyRoster);
        }
        Ok(sc)
    }

    pub fn agent(&self, name: &str) -> Option<&dyn Agent> {
        self.agents.iter().find(|a| a.name == name).map(|a| a as &dyn Agent)
    }

    /// Runs the scenario with its own agent order as the roster. The roster
    /// in `config` is ignored.
    pub fn run(&self, config: &ProtocolConfig, similarity: &dyn SimilarityProvider) -> Result<NegotiationLog, DriverError> {
        let cfg = config.clone().with_roster(self.agents.iter().map(|a| a.name.clone()));
        let agents: Vec<&dyn Agent> = self.agents.iter().map(|a| a as &dyn Agent).collect();
        run_negotiation(&self.project, &self.session_id, &agents, &cfg, similarity)
    }
}
