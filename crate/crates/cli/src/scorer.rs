//! Scoring agent construction and the remote scoring wire format.

use serde::{Deserialize, Serialize};

use caseval_core::generation::{render_context, render_note_section, render_transcript};
use caseval_core::scoring::{AgentError, ReferenceScorer, ScoreQuery, ScoringAgent};

use crate::manifest::{ScorerConfig, ScorerMode};
use crate::pipeline::PipelineError;

/// One criterion evaluation request as sent to a remote scoring agent.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireScoreRequest {
    pub note_id: String,
    pub case_id: String,
    pub criterion_index: usize,
    pub criterion_text: String,
    pub note_content: String,
    /// Transcript, longitudinal context, and point-in-time note rendered as
    /// one text bundle.
    pub case_context: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WireScoreResponse {
    pub satisfaction: f64,
}

/// HTTP client for a remote scoring agent. Safe for concurrent use; every
/// request is independent.
pub struct RemoteScorer {
    agent: ureq::Agent,
    endpoint: String,
    authorization: Option<String>,
    id: String,
}

impl RemoteScorer {
    pub fn new(endpoint: String, authorization: Option<String>, id: String) -> Self {
        RemoteScorer {
            agent: ureq::AgentBuilder::new()
                .timeout(std::time::Duration::from_secs(30))
                .build(),
            endpoint,
            authorization,
            id,
        }
    }
}

impl ScoringAgent for RemoteScorer {
    fn scorer_id(&self) -> &str {
        &self.id
    }

    fn satisfaction(&self, query: &ScoreQuery<'_>) -> Result<f64, AgentError> {
        let case_context = format!(
            "Transcript:\n{}\n\nLongitudinal context:\n{}\n\nPoint-in-time note:\n{}",
            render_transcript(query.case),
            render_context(query.case),
            render_note_section(query.case),
        );
        let request = WireScoreRequest {
            note_id: query.note_id.to_string(),
            case_id: query.case.case_id.clone(),
            criterion_index: query.criterion_index,
            criterion_text: query.criterion.text.clone(),
            note_content: query.note_content.to_string(),
            case_context,
        };
        let mut builder = self.agent.post(&self.endpoint);
        if let Some(token) = &self.authorization {
            builder = builder.set("authorization", &format!("Bearer {token}"));
        }
        let response = builder
            .send_json(&request)
            .map_err(|e| AgentError(e.to_string()))?;
        let parsed: WireScoreResponse = response
            .into_json()
            .map_err(|e| AgentError(format!("bad response payload: {e}")))?;
        Ok(parsed.satisfaction)
    }
}

/// Build the scoring agent a manifest asks for.
pub fn build_scorer(config: &ScorerConfig) -> Result<Box<dyn ScoringAgent>, PipelineError> {
    match config.mode {
        ScorerMode::Reference => Ok(Box::new(ReferenceScorer)),
        ScorerMode::Remote => {
            let endpoint = config
                .endpoint
                .clone()
                .ok_or_else(|| PipelineError::ingest("remote scorer requires an endpoint"))?;
            let authorization = match &config.credentials_env {
                None => None,
                Some(var) => Some(std::env::var(var).map_err(|_| {
                    PipelineError::ingest(format!(
                        "credentials variable `{var}` named in the manifest is not set"
                    ))
                })?),
            };
            let id = config
                .scorer_id
                .clone()
                .unwrap_or_else(|| "remote-v1".to_string());
            Ok(Box::new(RemoteScorer::new(endpoint, authorization, id)))
        }
    }
}
