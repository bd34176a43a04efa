//! Dataset manifest: input locations, experiment order, scorer and analysis
//! configuration. All relative paths resolve against the manifest file's
//! directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::pipeline::PipelineError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub cases_path: PathBuf,
    /// Directory holding one JSON document per rubric.
    pub rubrics_path: PathBuf,
    pub notes_path: PathBuf,
    pub experiments: Vec<String>,
    pub output_dir: PathBuf,
    pub scorer: ScorerConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub generation: Option<GenerationConfig>,
    #[serde(default)]
    pub costs: Option<CostConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerMode {
    Reference,
    Remote,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScorerConfig {
    pub mode: ScorerMode,
    #[serde(default)]
    pub endpoint: Option<String>,
    /// Name of the environment variable holding the bearer credential for
    /// remote scoring. Credentials never appear inline.
    #[serde(default)]
    pub credentials_env: Option<String>,
    #[serde(default)]
    pub scorer_id: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunReducer {
    #[default]
    Mean,
    Median,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// How repeated scoring runs collapse into one value per (note, rubric)
    /// when building rankings.
    #[serde(default)]
    pub run_reducer: RunReducer,
    /// Scoring runs per (note, rubric) pair in experiment scoring.
    #[serde(default = "default_runs")]
    pub runs_per_rubric: u32,
}

fn default_runs() -> u32 {
    caseval_core::scoring::EXPERIMENT_RUNS
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            run_reducer: RunReducer::default(),
            runs_per_rubric: default_runs(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationConfig {
    pub template_path: PathBuf,
    pub model_id: String,
    /// Directory of canned stub completions, one `<case_id>.json` per case,
    /// used by the offline completion port.
    pub canned_dir: PathBuf,
    #[serde(default = "default_attempts")]
    pub max_attempts: u32,
}

fn default_attempts() -> u32 {
    3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    /// Per-evaluator effort records; their hours are summed. Alternatively
    /// give `total_hours` directly.
    #[serde(default)]
    pub effort_path: Option<PathBuf>,
    #[serde(default)]
    pub total_hours: Option<f64>,
    pub accepted_rubrics: u64,
    #[serde(default)]
    pub selected_rubrics: Option<u64>,
    pub hourly_rate: f64,
    pub prices_path: PathBuf,
    pub generation_model: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub generated_rubrics: u64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PriceEntry {
    pub price_per_m_input: f64,
    pub price_per_m_output: f64,
    pub reasoning_multiplier: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PriceTable {
    pub models: BTreeMap<String, PriceEntry>,
}

fn resolve(base: &Path, path: &mut PathBuf) {
    if path.is_relative() {
        *path = base.join(&*path);
    }
}

/// Load and validate a manifest, resolving relative paths against its
/// directory.
pub fn load_manifest(path: &Path) -> Result<Manifest, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        PipelineError::ingest(format!("cannot read manifest {}: {e}", path.display()))
    })?;
    let mut manifest: Manifest = toml::from_str(&text)
        .map_err(|e| PipelineError::ingest(format!("manifest {}: {e}", path.display())))?;

    if manifest.experiments.is_empty() {
        return Err(PipelineError::ingest("manifest lists no experiments"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for experiment in &manifest.experiments {
        if !seen.insert(experiment) {
            return Err(PipelineError::ingest(format!(
                "duplicate experiment id `{experiment}` in manifest"
            )));
        }
    }
    if manifest.scorer.mode == ScorerMode::Remote && manifest.scorer.endpoint.is_none() {
        return Err(PipelineError::ingest(
            "scorer mode `remote` requires an endpoint",
        ));
    }
    if manifest.analysis.runs_per_rubric == 0 {
        return Err(PipelineError::ingest("runs_per_rubric must be at least 1"));
    }

    let base = path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();
    resolve(&base, &mut manifest.cases_path);
    resolve(&base, &mut manifest.rubrics_path);
    resolve(&base, &mut manifest.notes_path);
    resolve(&base, &mut manifest.output_dir);
    if let Some(generation) = manifest.generation.as_mut() {
        resolve(&base, &mut generation.template_path);
        resolve(&base, &mut generation.canned_dir);
    }
    if let Some(costs) = manifest.costs.as_mut() {
        if let Some(effort) = costs.effort_path.as_mut() {
            resolve(&base, effort);
        }
        resolve(&base, &mut costs.prices_path);
    }
    Ok(manifest)
}

/// Load a price table and find one model's entry.
pub fn load_price_entry(path: &Path, model_id: &str) -> Result<PriceEntry, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        PipelineError::ingest(format!("cannot read price config {}: {e}", path.display()))
    })?;
    let table: PriceTable = toml::from_str(&text)
        .map_err(|e| PipelineError::ingest(format!("price config {}: {e}", path.display())))?;
    table.models.get(model_id).cloned().ok_or_else(|| {
        PipelineError::ingest(format!(
            "price config {} has no entry for model `{model_id}`",
            path.display()
        ))
    })
}
