//! Shared domain types, their invariants, and identity rules.
//!
//! Records arrive from the ingestion layer as loosely typed *draft* structs
//! ([`CaseRecord`], [`RubricRecord`], [`NoteRecord`]) and are promoted to the
//! validated types by [`validate_case`], [`validate_rubric_structure`], and
//! [`validate_note`]. The validated types are immutable after construction
//! and safe to share between worker threads.

use chrono::{DateTime, Utc};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Required prefix for every criterion text.
pub const CRITERION_PREFIX: &str = "Reward for";

/// Allowed criteria counts for clinician-authored rubrics (inclusive range).
pub const CLINICIAN_CRITERIA_MIN: usize = 1;
pub const CLINICIAN_CRITERIA_MAX: usize = 15;

/// Allowed criteria counts for LLM-generated rubrics.
pub const LLM_CRITERIA_ALLOWED: [usize; 3] = [4, 5, 6];

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("case `{case_id}`: transcript is empty")]
    EmptyTranscript { case_id: String },
    #[error("case `{case_id}`: turn {index} has an empty {field}")]
    BlankTurn {
        case_id: String,
        index: usize,
        field: &'static str,
    },
    #[error("invalid {field} value `{value}`")]
    InvalidTag { field: String, value: String },
    #[error("rubric `{rubric_id}`: criterion {index} must begin with `{CRITERION_PREFIX}`")]
    BadCriterionPrefix { rubric_id: String, index: usize },
    #[error(
        "rubric `{rubric_id}`: criterion {index} has weight {weight}; weights are integers >= 1"
    )]
    WeightOutOfRange {
        rubric_id: String,
        index: usize,
        weight: i64,
    },
    #[error("rubric `{rubric_id}`: {count} criteria is outside the allowed range for {rubric_source} rubrics")]
    CriterionCountViolation {
        rubric_id: String,
        rubric_source: RubricSource,
        count: usize,
    },
    #[error("rubric `{rubric_id}`: no criterion of kind `{kind}`")]
    MissingMandatedCriterion {
        rubric_id: String,
        kind: CriterionKind,
    },
    #[error("rubric `{rubric_id}`: more than one criterion of kind `{kind}`")]
    DuplicateMandatedCriterion {
        rubric_id: String,
        kind: CriterionKind,
    },
}

fn parse_tag<T: DeserializeOwned>(field: &str, value: &str) -> Result<T, ModelError> {
    serde_json::from_value(serde_json::Value::String(value.to_string())).map_err(|_| {
        ModelError::InvalidTag {
            field: field.to_string(),
            value: value.to_string(),
        }
    })
}

/// One speaker-attributed utterance of a transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub speaker: String,
    pub text: String,
}

/// Longitudinal patient context: the historical record available at scoring time.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LongitudinalContext {
    #[serde(default)]
    pub conditions: Vec<String>,
    #[serde(default)]
    pub medications: Vec<String>,
    #[serde(default)]
    pub allergies: Vec<String>,
    #[serde(default)]
    pub surgical_history: Vec<String>,
    #[serde(default)]
    pub family_history: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncounterLength {
    Short,
    Medium,
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemCount {
    Single,
    Multi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acuity {
    Low,
    Moderate,
    High,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Real,
    Synthetic,
}

/// The five tagging dimensions of a case. Specialty and encounter type are
/// open vocabularies; the other three are closed enums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseTags {
    pub specialty: String,
    pub encounter_type: String,
    pub length: EncounterLength,
    pub problem_count: ProblemCount,
    pub acuity: Acuity,
}

/// A clinical encounter segment: transcript, optional point-in-time note,
/// and longitudinal context, plus tags and provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case {
    pub case_id: String,
    pub transcript: Vec<Turn>,
    /// Chart state at the start of the segment. Absence is a first-class
    /// state, distinct from an empty note.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point_in_time_note: Option<String>,
    #[serde(default)]
    pub context: LongitudinalContext,
    pub tags: CaseTags,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionKind {
    Completeness,
    NonRepetition,
    Other,
}

impl std::fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            CriterionKind::Completeness => "completeness",
            CriterionKind::NonRepetition => "non_repetition",
            CriterionKind::Other => "other",
        };
        f.write_str(name)
    }
}

/// One weighted natural-language documentation requirement.
///
/// `evidence` is an optional list of phrases the deterministic reference
/// scorer looks for in a note; live scoring agents ignore it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub text: String,
    pub weight: u32,
    pub kind: CriterionKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RubricSource {
    Clinician,
    Llm,
}

impl std::fmt::Display for RubricSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RubricSource::Clinician => "clinician",
            RubricSource::Llm => "llm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RubricStatus {
    Draft,
    Validated,
    Rejected,
}

impl std::fmt::Display for RubricStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            RubricStatus::Draft => "draft",
            RubricStatus::Validated => "validated",
            RubricStatus::Rejected => "rejected",
        })
    }
}

/// A case-specific set of weighted criteria, owned by one author.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rubric {
    pub rubric_id: String,
    pub case_id: String,
    pub source: RubricSource,
    /// Clinician identifier for clinician rubrics, model identifier for
    /// LLM rubrics. Doubles as the labeler key during gate validation.
    pub author_id: String,
    pub criteria: Vec<Criterion>,
    pub status: RubricStatus,
}

impl Rubric {
    pub fn weights(&self) -> Vec<u32> {
        self.criteria.iter().map(|c| c.weight).collect()
    }

    pub fn total_weight(&self) -> u64 {
        self.criteria.iter().map(|c| u64::from(c.weight)).sum()
    }

    pub fn with_status(&self, status: RubricStatus) -> Rubric {
        Rubric {
            status,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Vendor {
    Openai,
    Anthropic,
    Other,
}

impl std::fmt::Display for Vendor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Vendor::Openai => "openai",
            Vendor::Anthropic => "anthropic",
            Vendor::Other => "other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelKind {
    Best,
    Worst,
}

impl std::fmt::Display for LabelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LabelKind::Best => "best",
            LabelKind::Worst => "worst",
        })
    }
}

/// A best/worst judgment attached to a note by one labeler.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoteLabel {
    pub kind: LabelKind,
    pub labeler_id: String,
}

/// One candidate AI-generated note for a case within one experiment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoteOutput {
    pub note_id: String,
    pub case_id: String,
    pub experiment_id: String,
    pub vendor: Vendor,
    /// Free-form model/prompt provenance string.
    pub generator_config: String,
    pub content: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<NoteLabel>,
}

/// One scoring run of one note against one rubric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub note_id: String,
    pub rubric_id: String,
    pub run_index: u32,
    /// Per-criterion satisfactions in [0, 1], aligned with the rubric's
    /// criteria order.
    pub satisfactions: Vec<f64>,
    /// Weighted satisfaction on the 0-100 scale.
    pub normalized_score: f64,
    pub scorer_id: String,
    pub created_at: DateTime<Utc>,
}

// ---------------------------------------------------------------------------
// Draft records: decode targets for the ingestion layer.
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseTagsRecord {
    pub specialty: String,
    pub encounter_type: String,
    pub length: String,
    pub problem_count: String,
    pub acuity: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: String,
    pub transcript: Vec<Turn>,
    #[serde(default)]
    pub point_in_time_note: Option<String>,
    #[serde(default)]
    pub context: LongitudinalContext,
    pub tags: CaseTagsRecord,
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionRecord {
    pub text: String,
    pub weight: i64,
    pub kind: String,
    #[serde(default)]
    pub evidence: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RubricRecord {
    pub rubric_id: String,
    pub case_id: String,
    pub source: String,
    pub author_id: String,
    pub criteria: Vec<CriterionRecord>,
    #[serde(default = "default_status")]
    pub status: String,
}

fn default_status() -> String {
    "draft".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoteLabelRecord {
    pub kind: String,
    pub labeler_id: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoteRecord {
    pub note_id: String,
    pub case_id: String,
    pub experiment_id: String,
    pub vendor: String,
    pub generator_config: String,
    pub content: String,
    #[serde(default)]
    pub label: Option<NoteLabelRecord>,
}

impl From<&Rubric> for RubricRecord {
    fn from(rubric: &Rubric) -> Self {
        RubricRecord {
            rubric_id: rubric.rubric_id.clone(),
            case_id: rubric.case_id.clone(),
            source: rubric.source.to_string(),
            author_id: rubric.author_id.clone(),
            criteria: rubric
                .criteria
                .iter()
                .map(|c| CriterionRecord {
                    text: c.text.clone(),
                    weight: i64::from(c.weight),
                    kind: c.kind.to_string(),
                    evidence: c.evidence.clone(),
                })
                .collect(),
            status: rubric.status.to_string(),
        }
    }
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

/// Promote a decoded case record to a validated [`Case`].
///
/// Uniqueness of `case_id` across a dataset is the loader's responsibility.
pub fn validate_case(raw: CaseRecord) -> Result<Case, ModelError> {
    if raw.transcript.is_empty() {
        return Err(ModelError::EmptyTranscript {
            case_id: raw.case_id,
        });
    }
    for (index, turn) in raw.transcript.iter().enumerate() {
        if turn.speaker.trim().is_empty() {
            return Err(ModelError::BlankTurn {
                case_id: raw.case_id,
                index,
                field: "speaker",
            });
        }
        if turn.text.trim().is_empty() {
            return Err(ModelError::BlankTurn {
                case_id: raw.case_id,
                index,
                field: "text",
            });
        }
    }
    let tags = CaseTags {
        specialty: raw.tags.specialty,
        encounter_type: raw.tags.encounter_type,
        length: parse_tag("length", &raw.tags.length)?,
        problem_count: parse_tag("problem_count", &raw.tags.problem_count)?,
        acuity: parse_tag("acuity", &raw.tags.acuity)?,
    };
    let provenance = parse_tag("provenance", &raw.provenance)?;
    Ok(Case {
        case_id: raw.case_id,
        transcript: raw.transcript,
        point_in_time_note: raw.point_in_time_note,
        context: raw.context,
        tags,
        provenance,
    })
}

/// Promote a decoded rubric record to a validated [`Rubric`], enforcing the
/// source-specific criteria-count bounds and the two mandated criterion kinds.
pub fn validate_rubric_structure(raw: RubricRecord) -> Result<Rubric, ModelError> {
    let rubric_id = raw.rubric_id;
    let source: RubricSource = parse_tag("source", &raw.source)?;
    let status: RubricStatus = parse_tag("status", &raw.status)?;

    let count = raw.criteria.len();
    let count_ok = match source {
        RubricSource::Clinician => {
            (CLINICIAN_CRITERIA_MIN..=CLINICIAN_CRITERIA_MAX).contains(&count)
        }
        RubricSource::Llm => LLM_CRITERIA_ALLOWED.contains(&count),
    };
    if !count_ok {
        return Err(ModelError::CriterionCountViolation {
            rubric_id,
            rubric_source: source,
            count,
        });
    }

    let mut criteria = Vec::with_capacity(count);
    for (index, raw_criterion) in raw.criteria.into_iter().enumerate() {
        if !raw_criterion.text.starts_with(CRITERION_PREFIX) {
            return Err(ModelError::BadCriterionPrefix {
                rubric_id: rubric_id.clone(),
                index,
            });
        }
        if raw_criterion.weight < 1 || raw_criterion.weight > i64::from(u32::MAX) {
            return Err(ModelError::WeightOutOfRange {
                rubric_id: rubric_id.clone(),
                index,
                weight: raw_criterion.weight,
            });
        }
        let kind: CriterionKind = parse_tag("kind", &raw_criterion.kind)?;
        criteria.push(Criterion {
            text: raw_criterion.text,
            weight: raw_criterion.weight as u32,
            kind,
            evidence: raw_criterion.evidence,
        });
    }

    for kind in [CriterionKind::Completeness, CriterionKind::NonRepetition] {
        match criteria.iter().filter(|c| c.kind == kind).count() {
            0 => {
                return Err(ModelError::MissingMandatedCriterion {
                    rubric_id: rubric_id.clone(),
                    kind,
                })
            }
            1 => {}
            _ => {
                return Err(ModelError::DuplicateMandatedCriterion {
                    rubric_id: rubric_id.clone(),
                    kind,
                })
            }
        }
    }

    Ok(Rubric {
        rubric_id,
        case_id: raw.case_id,
        source,
        author_id: raw.author_id,
        criteria,
        status,
    })
}

/// Promote a decoded note record to a validated [`NoteOutput`].
///
/// The at-most-one-best/one-worst rule per (case, labeler) spans records and
/// is enforced by the dataset loader.
pub fn validate_note(raw: NoteRecord) -> Result<NoteOutput, ModelError> {
    let vendor: Vendor = parse_tag("vendor", &raw.vendor)?;
    let label = match raw.label {
        None => None,
        Some(l) => Some(NoteLabel {
            kind: parse_tag("label kind", &l.kind)?,
            labeler_id: l.labeler_id,
        }),
    };
    Ok(NoteOutput {
        note_id: raw.note_id,
        case_id: raw.case_id,
        experiment_id: raw.experiment_id,
        vendor,
        generator_config: raw.generator_config,
        content: raw.content,
        label,
    })
}
