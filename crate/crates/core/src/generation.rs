//! Prompt assembly and parsing for LLM-generated rubrics.
//!
//! Generated rubrics share the clinician rubric structure and are validated
//! by the same structural rules, but they bypass the best/worst gate: a
//! successfully parsed rubric is emitted with status `validated` directly.

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::model::{
    validate_rubric_structure, Case, CriterionRecord, ModelError, Rubric, RubricRecord,
};

/// Template slot markers. A generation template must contain all three plus
/// an instruction that names the documentation-fidelity objective.
pub const TRANSCRIPT_SLOT: &str = "{{transcript}}";
pub const CONTEXT_SLOT: &str = "{{context}}";
pub const NOTE_SLOT: &str = "{{note}}";
pub const FIDELITY_PHRASE: &str = "documentation fidelity";

/// Rendered in place of the point-in-time note when a case has none; the
/// slot is never left empty.
pub const NO_PRIOR_NOTE_MARKER: &str = "No prior note is on file for this encounter.";

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("template does not fill the `{slot}` slot")]
    UnfilledSlot { slot: String },
    #[error("response is not a structured rubric: {detail}")]
    UnparseableResponse { detail: String },
    #[error(transparent)]
    Structure(#[from] ModelError),
    #[error("completion port failure: {0}")]
    Port(String),
    #[error("generation exhausted after {attempts} attempts; last error: {last_error}")]
    Exhausted { attempts: u32, last_error: String },
}

/// Input and output token counts for one or more completion calls.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub input_tokens: u64,
    pub output_tokens: u64,
}

impl std::ops::Add for TokenUsage {
    type Output = TokenUsage;
    fn add(self, other: TokenUsage) -> TokenUsage {
        TokenUsage {
            input_tokens: self.input_tokens + other.input_tokens,
            output_tokens: self.output_tokens + other.output_tokens,
        }
    }
}

/// Record of one rubric-generation invocation. Token usage is summed over
/// every attempt, not just the successful one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub case_id: String,
    pub prompt_text: String,
    pub model_id: String,
    pub token_usage: TokenUsage,
}

pub struct CompletionRequest<'a> {
    pub prompt: &'a str,
    /// Structured-output schema descriptor forwarded to the provider.
    pub schema: &'a serde_json::Value,
}

pub struct Completion {
    pub text: String,
    pub usage: TokenUsage,
}

/// Text-completion port. Implementations must be safe for concurrent use up
/// to whatever in-flight limit the pipeline imposes.
pub trait TextCompletionPort: Send + Sync {
    fn model_id(&self) -> &str;
    fn complete(&self, request: &CompletionRequest<'_>) -> Result<Completion, GenerationError>;
}

/// JSON schema descriptor for the structured rubric response. Criterion
/// kinds are requested explicitly so mandated-criteria validation never has
/// to parse prose.
pub fn rubric_response_schema() -> serde_json::Value {
    json!({
        "type": "object",
        "required": ["criteria"],
        "properties": {
            "criteria": {
                "type": "array",
                "minItems": 4,
                "maxItems": 6,
                "items": {
                    "type": "object",
                    "required": ["text", "weight", "kind"],
                    "properties": {
                        "text": {"type": "string", "pattern": "^Reward for"},
                        "weight": {"type": "integer", "minimum": 1},
                        "kind": {"type": "string", "enum": ["completeness", "non_repetition", "other"]}
                    }
                }
            }
        }
    })
}

/// Render the transcript as speaker-attributed lines.
pub fn render_transcript(case: &Case) -> String {
    case.transcript
        .iter()
        .map(|turn| format!("{}: {}", turn.speaker, turn.text))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Render the longitudinal context as labeled sections.
pub fn render_context(case: &Case) -> String {
    let section = |label: &str, items: &[String]| {
        if items.is_empty() {
            format!("{label}: none recorded")
        } else {
            format!("{label}: {}", items.join("; "))
        }
    };
    [
        section("Conditions", &case.context.conditions),
        section("Medications", &case.context.medications),
        section("Allergies", &case.context.allergies),
        section("Surgical history", &case.context.surgical_history),
        section("Family history", &case.context.family_history),
    ]
    .join("\n")
}

/// Render the point-in-time note or the explicit no-prior-note marker.
pub fn render_note_section(case: &Case) -> String {
    match &case.point_in_time_note {
        Some(note) => note.clone(),
        None => NO_PRIOR_NOTE_MARKER.to_string(),
    }
}

/// Fill a generation template with the case inputs. Pure: identical inputs
/// yield byte-identical prompts.
pub fn assemble_prompt(case: &Case, template: &str) -> Result<String, GenerationError> {
    for slot in [TRANSCRIPT_SLOT, CONTEXT_SLOT, NOTE_SLOT] {
        if !template.contains(slot) {
            return Err(GenerationError::UnfilledSlot {
                slot: slot.to_string(),
            });
        }
    }
    if !template.to_lowercase().contains(FIDELITY_PHRASE) {
        return Err(GenerationError::UnfilledSlot {
            slot: FIDELITY_PHRASE.to_string(),
        });
    }
    Ok(template
        .replace(TRANSCRIPT_SLOT, &render_transcript(case))
        .replace(CONTEXT_SLOT, &render_context(case))
        .replace(NOTE_SLOT, &render_note_section(case)))
}

#[derive(Debug, Deserialize)]
struct GeneratedRubricResponse {
    criteria: Vec<CriterionRecord>,
}

fn strip_code_fence(text: &str) -> &str {
    let trimmed = text.trim();
    let Some(inner) = trimmed.strip_prefix("```") else {
        return trimmed;
    };
    let inner = inner.strip_prefix("json").unwrap_or(inner);
    inner
        .trim_start()
        .strip_suffix("```")
        .unwrap_or(inner)
        .trim()
}

/// Deterministic identifier for the single default LLM rubric of a case.
pub fn llm_rubric_id(case_id: &str) -> String {
    format!("rub-{case_id}-llm")
}

/// Parse a structured completion into a validated LLM rubric.
pub fn parse_generated_rubric(
    response_text: &str,
    case_id: &str,
    model_id: &str,
) -> Result<Rubric, GenerationError> {
    let body = strip_code_fence(response_text);
    let response: GeneratedRubricResponse =
        serde_json::from_str(body).map_err(|e| GenerationError::UnparseableResponse {
            detail: e.to_string(),
        })?;
    let record = RubricRecord {
        rubric_id: llm_rubric_id(case_id),
        case_id: case_id.to_string(),
        source: "llm".to_string(),
        author_id: model_id.to_string(),
        criteria: response.criteria,
        // Generated rubrics are not subjected to the best/worst gate.
        status: "validated".to_string(),
    };
    Ok(validate_rubric_structure(record)?)
}

/// Outcome of a successful generation: the validated rubric, the request
/// record with accumulated token usage, and how many attempts it took.
#[derive(Debug)]
pub struct GenerationOutcome {
    pub rubric: Rubric,
    pub request: GenerationRequest,
    pub attempts: u32,
}

/// Generate one rubric for a case, retrying structural failures with the
/// error appended to the prompt so the model can correct itself.
pub fn generate_rubric(
    case: &Case,
    port: &dyn TextCompletionPort,
    template: &str,
    max_attempts: u32,
) -> Result<GenerationOutcome, GenerationError> {
    let base_prompt = assemble_prompt(case, template)?;
    let schema = rubric_response_schema();
    let mut usage = TokenUsage::default();
    let mut last_error = String::new();
    let max_attempts = max_attempts.max(1);

    for attempt in 1..=max_attempts {
        let prompt = if attempt == 1 {
            base_prompt.clone()
        } else {
            format!(
                "{base_prompt}\n\nThe previous response was rejected: {last_error}\n\
                 Respond again with corrected JSON that satisfies the schema."
            )
        };
        let request = CompletionRequest {
            prompt: &prompt,
            schema: &schema,
        };
        match port.complete(&request) {
            Err(GenerationError::Port(message)) => {
                last_error = format!("completion port failure: {message}");
                continue;
            }
            Err(other) => return Err(other),
            Ok(completion) => {
                usage = usage + completion.usage;
                match parse_generated_rubric(&completion.text, &case.case_id, port.model_id()) {
                    Ok(rubric) => {
                        return Ok(GenerationOutcome {
                            rubric,
                            request: GenerationRequest {
                                case_id: case.case_id.clone(),
                                prompt_text: base_prompt,
                                model_id: port.model_id().to_string(),
                                token_usage: usage,
                            },
                            attempts: attempt,
                        });
                    }
                    Err(error) => {
                        last_error = error.to_string();
                    }
                }
            }
        }
    }
    Err(GenerationError::Exhausted {
        attempts: max_attempts,
        last_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        Acuity, CaseTags, EncounterLength, LongitudinalContext, ProblemCount, Provenance,
        RubricSource, RubricStatus, Turn,
    };
    use std::sync::Mutex;

    const TEMPLATE: &str = "Assess documentation fidelity for this encounter.\n\
        Transcript:\n{{transcript}}\n\nChart context:\n{{context}}\n\n\
        Point-in-time note:\n{{note}}\n\nReturn JSON criteria.";

    fn case(with_note: bool) -> Case {
        Case {
            case_id: "case-a".into(),
            transcript: vec![
                Turn {
                    speaker: "clinician".into(),
                    text: "How is the new inhaler working?".into(),
                },
                Turn {
                    speaker: "patient".into(),
                    text: "Much better at night.".into(),
                },
            ],
            point_in_time_note: with_note.then(|| "Asthma, stable.".to_string()),
            context: LongitudinalContext {
                conditions: vec!["asthma".into()],
                medications: vec!["albuterol".into()],
                ..Default::default()
            },
            tags: CaseTags {
                specialty: "primary_care".into(),
                encounter_type: "follow_up".into(),
                length: EncounterLength::Short,
                problem_count: ProblemCount::Single,
                acuity: Acuity::Low,
            },
            provenance: Provenance::Real,
        }
    }

    fn valid_response() -> String {
        serde_json::json!({
            "criteria": [
                {"text": "Reward for documenting the inhaler response", "weight": 3, "kind": "other"},
                {"text": "Reward for capturing the full exchange", "weight": 2, "kind": "completeness"},
                {"text": "Reward for omitting chart content already present", "weight": 2, "kind": "non_repetition"},
                {"text": "Reward for recording nighttime symptom change", "weight": 1, "kind": "other"},
                {"text": "Reward for noting the follow-up interval", "weight": 1, "kind": "other"}
            ]
        })
        .to_string()
    }

    #[test]
    fn prompt_contains_all_sections_in_template_order() {
        let prompt = assemble_prompt(&case(true), TEMPLATE).unwrap();
        let transcript_at = prompt
            .find("clinician: How is the new inhaler working?")
            .unwrap();
        let context_at = prompt.find("Conditions: asthma").unwrap();
        let note_at = prompt.find("Asthma, stable.").unwrap();
        assert!(transcript_at < context_at && context_at < note_at);
        // Purity: identical inputs give byte-identical prompts.
        assert_eq!(prompt, assemble_prompt(&case(true), TEMPLATE).unwrap());
    }

    #[test]
    fn missing_note_renders_marker() {
        let prompt = assemble_prompt(&case(false), TEMPLATE).unwrap();
        assert!(prompt.contains(NO_PRIOR_NOTE_MARKER));
    }

    #[test]
    fn template_without_transcript_slot_is_rejected() {
        let bad = TEMPLATE.replace(TRANSCRIPT_SLOT, "");
        assert!(matches!(
            assemble_prompt(&case(true), &bad),
            Err(GenerationError::UnfilledSlot { slot }) if slot == TRANSCRIPT_SLOT
        ));
    }

    #[test]
    fn parse_accepts_valid_response() {
        let rubric = parse_generated_rubric(&valid_response(), "case-a", "model-x").unwrap();
        assert_eq!(rubric.source, RubricSource::Llm);
        assert_eq!(rubric.status, RubricStatus::Validated);
        assert_eq!(rubric.author_id, "model-x");
        assert_eq!(rubric.criteria.len(), 5);
    }

    #[test]
    fn parse_accepts_fenced_response() {
        let fenced = format!("```json\n{}\n```", valid_response());
        assert!(parse_generated_rubric(&fenced, "case-a", "model-x").is_ok());
    }

    #[test]
    fn parse_rejects_three_criteria() {
        let response = serde_json::json!({
            "criteria": [
                {"text": "Reward for a", "weight": 1, "kind": "completeness"},
                {"text": "Reward for b", "weight": 1, "kind": "non_repetition"},
                {"text": "Reward for c", "weight": 1, "kind": "other"}
            ]
        })
        .to_string();
        assert!(matches!(
            parse_generated_rubric(&response, "case-a", "model-x"),
            Err(GenerationError::Structure(
                ModelError::CriterionCountViolation { count: 3, .. }
            ))
        ));
    }

    #[test]
    fn parse_rejects_missing_non_repetition() {
        let response = serde_json::json!({
            "criteria": [
                {"text": "Reward for a", "weight": 1, "kind": "completeness"},
                {"text": "Reward for b", "weight": 1, "kind": "other"},
                {"text": "Reward for c", "weight": 1, "kind": "other"},
                {"text": "Reward for d", "weight": 1, "kind": "other"}
            ]
        })
        .to_string();
        assert!(matches!(
            parse_generated_rubric(&response, "case-a", "model-x"),
            Err(GenerationError::Structure(
                ModelError::MissingMandatedCriterion { .. }
            ))
        ));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(matches!(
            parse_generated_rubric("thanks, here you go!", "case-a", "model-x"),
            Err(GenerationError::UnparseableResponse { .. })
        ));
    }

    struct ScriptedPort {
        responses: Mutex<Vec<String>>,
        prompts_seen: Mutex<Vec<String>>,
    }
    impl ScriptedPort {
        fn new(responses: Vec<String>) -> Self {
            ScriptedPort {
                responses: Mutex::new(responses),
                prompts_seen: Mutex::new(Vec::new()),
            }
        }
    }
    impl TextCompletionPort for ScriptedPort {
        fn model_id(&self) -> &str {
            "scripted-model"
        }
        fn complete(&self, request: &CompletionRequest<'_>) -> Result<Completion, GenerationError> {
            self.prompts_seen
                .lock()
                .unwrap()
                .push(request.prompt.to_string());
            let mut responses = self.responses.lock().unwrap();
            if responses.is_empty() {
                return Err(GenerationError::Port("no scripted response left".into()));
            }
            Ok(Completion {
                text: responses.remove(0),
                usage: TokenUsage {
                    input_tokens: 100,
                    output_tokens: 40,
                },
            })
        }
    }

    #[test]
    fn generation_succeeds_first_attempt() {
        let port = ScriptedPort::new(vec![valid_response()]);
        let outcome = generate_rubric(&case(true), &port, TEMPLATE, 3).unwrap();
        assert_eq!(outcome.attempts, 1);
        assert_eq!(outcome.request.token_usage.input_tokens, 100);
        assert_eq!(outcome.rubric.rubric_id, "rub-case-a-llm");
    }

    #[test]
    fn generation_retries_with_error_feedback_and_sums_usage() {
        let port = ScriptedPort::new(vec!["not json".into(), valid_response()]);
        let outcome = generate_rubric(&case(true), &port, TEMPLATE, 3).unwrap();
        assert_eq!(outcome.attempts, 2);
        // Usage covers both attempts.
        assert_eq!(outcome.request.token_usage.input_tokens, 200);
        assert_eq!(outcome.request.token_usage.output_tokens, 80);
        let prompts = port.prompts_seen.lock().unwrap();
        assert!(prompts[1].contains("previous response was rejected"));
        assert!(prompts[1].contains("not a structured rubric"));
    }

    #[test]
    fn generation_exhausts_after_max_attempts() {
        let port = ScriptedPort::new(vec!["bad".into(), "worse".into(), "nope".into()]);
        let err = generate_rubric(&case(true), &port, TEMPLATE, 3).unwrap_err();
        assert!(matches!(
            err,
            GenerationError::Exhausted { attempts: 3, .. }
        ));
    }

    #[test]
    fn fuzzed_responses_never_emit_invalid_rubrics() {
        // Emitted implies valid: whatever junk the port returns, a returned
        // rubric passes structural validation.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..300 {
            let n = rng.gen_range(0..8);
            let criteria: Vec<serde_json::Value> = (0..n)
                .map(|i| {
                    let kind =
                        ["completeness", "non_repetition", "other", "bogus"][rng.gen_range(0..4)];
                    let prefix = if rng.gen_bool(0.8) {
                        "Reward for"
                    } else {
                        "Check"
                    };
                    serde_json::json!({
                        "text": format!("{prefix} item {i}"),
                        "weight": rng.gen_range(-1i64..4),
                        "kind": kind,
                    })
                })
                .collect();
            let text = if rng.gen_bool(0.1) {
                "garbage".to_string()
            } else {
                serde_json::json!({ "criteria": criteria }).to_string()
            };
            if let Ok(rubric) = parse_generated_rubric(&text, "case-a", "model-x") {
                let record = RubricRecord::from(&rubric);
                let revalidated = validate_rubric_structure(record).unwrap();
                assert_eq!(revalidated, rubric);
            }
        }
    }
}
