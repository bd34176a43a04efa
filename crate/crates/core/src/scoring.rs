//! Scoring-agent port, normalized scoring, repeated runs, and stability.

use std::time::Duration;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Case, Criterion, NoteOutput, Rubric, ScoreRecord};
use crate::stats;

/// Scoring runs used by the best/worst validation gate.
pub const VALIDATION_RUNS: u32 = 3;
/// Scoring runs used for experiment scoring.
pub const EXPERIMENT_RUNS: u32 = 2;

#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("satisfactions ({satisfactions}) and weights ({weights}) differ in length")]
    LengthMismatch {
        satisfactions: usize,
        weights: usize,
    },
    #[error("cannot score against an empty criteria list")]
    EmptyCriteria,
    #[error("reference scoring requires a non-empty evidence list")]
    EmptyEvidence,
    #[error(
        "scoring agent returned {value} for criterion {criterion_index} of \
         note `{note_id}` (run {run_index}); satisfactions must lie in [0, 1]"
    )]
    SatisfactionOutOfRange {
        note_id: String,
        run_index: u32,
        criterion_index: usize,
        value: f64,
    },
    #[error(
        "scoring agent transport failure on note `{note_id}` criterion \
         {criterion_index} (run {run_index}) after {attempts} attempts: {message}"
    )]
    AgentTransport {
        note_id: String,
        run_index: u32,
        criterion_index: usize,
        attempts: u32,
        message: String,
    },
    #[error("note `{note_id}`, rubric `{rubric_id}`, and case `{case_id}` do not share one case")]
    CaseMismatch {
        note_id: String,
        rubric_id: String,
        case_id: String,
    },
    #[error("stability needs at least 2 runs, got {got}")]
    TooFewRuns { got: usize },
    #[error(
        "records mix keys: expected ({expected_note}, {expected_rubric}), found ({note}, {rubric})"
    )]
    MixedKeys {
        expected_note: String,
        expected_rubric: String,
        note: String,
        rubric: String,
    },
    #[error("empty input")]
    EmptyInput,
}

/// Transport-level failure of a scoring agent. Retried per [`RetryPolicy`].
#[derive(Debug, Error)]
#[error("{0}")]
pub struct AgentError(pub String);

/// Everything a scoring agent sees for one (note, criterion) evaluation.
pub struct ScoreQuery<'a> {
    pub note_id: &'a str,
    pub note_content: &'a str,
    pub criterion_index: usize,
    pub criterion: &'a Criterion,
    pub case: &'a Case,
}

/// Behavioral contract of a scoring agent: given a note, one criterion, and
/// the case context, return a satisfaction in [0, 1].
///
/// Implementations must be safe for concurrent invocation; an implementation
/// that cannot be should serialize internally.
pub trait ScoringAgent: Send + Sync {
    fn scorer_id(&self) -> &str;
    fn satisfaction(&self, query: &ScoreQuery<'_>) -> Result<f64, AgentError>;
}

/// Retry behavior for transport failures: `max_attempts` total tries with
/// exponential backoff between them. The failure of a run never cancels
/// sibling runs; callers decide what to do with partial batches.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 3,
            base_delay: Duration::from_millis(50),
        }
    }
}

impl RetryPolicy {
    /// No waiting between attempts. Intended for tests and offline scorers.
    pub fn immediate(max_attempts: u32) -> Self {
        RetryPolicy {
            max_attempts,
            base_delay: Duration::ZERO,
        }
    }
}

/// Options for [`score_note`].
#[derive(Debug, Clone)]
pub struct ScoreOptions {
    pub n_runs: u32,
    pub retry: RetryPolicy,
    /// Timestamp stamped on every produced record. Supplied by the caller so
    /// that replays can pin it.
    pub created_at: DateTime<Utc>,
}

impl ScoreOptions {
    pub fn new(n_runs: u32, created_at: DateTime<Utc>) -> Self {
        ScoreOptions {
            n_runs,
            retry: RetryPolicy::default(),
            created_at,
        }
    }
}

/// Weighted satisfaction aggregation onto the 0-100 scale:
/// sum(w_i * s_i) / sum(w_i) * 100.
pub fn compute_normalized_score(
    satisfactions: &[f64],
    weights: &[u32],
) -> Result<f64, ScoringError> {
    if satisfactions.is_empty() || weights.is_empty() {
        return Err(ScoringError::EmptyCriteria);
    }
    if satisfactions.len() != weights.len() {
        return Err(ScoringError::LengthMismatch {
            satisfactions: satisfactions.len(),
            weights: weights.len(),
        });
    }
    let mut weighted = 0.0;
    let mut total = 0.0;
    for (&s, &w) in satisfactions.iter().zip(weights) {
        weighted += f64::from(w) * s;
        total += f64::from(w);
    }
    Ok(weighted / total * 100.0)
}

/// Deterministic offline satisfaction: the fraction of evidence phrases found
/// in the note by case-insensitive substring match. No stemming.
pub fn reference_satisfaction(
    note_content: &str,
    evidence: &[String],
) -> Result<f64, ScoringError> {
    if evidence.is_empty() {
        return Err(ScoringError::EmptyEvidence);
    }
    let haystack = note_content.to_lowercase();
    let hits = evidence
        .iter()
        .filter(|phrase| haystack.contains(&phrase.to_lowercase()))
        .count();
    Ok(hits as f64 / evidence.len() as f64)
}

/// Offline stand-in for an LLM scoring agent, backed by per-criterion
/// evidence phrases. Stateless and fully deterministic.
#[derive(Debug, Clone, Copy, Default)]
pub struct ReferenceScorer;

impl ReferenceScorer {
    pub const ID: &'static str = "reference-v1";
}

impl ScoringAgent for ReferenceScorer {
    fn scorer_id(&self) -> &str {
        Self::ID
    }

    fn satisfaction(&self, query: &ScoreQuery<'_>) -> Result<f64, AgentError> {
        reference_satisfaction(query.note_content, &query.criterion.evidence)
            .map_err(|e| AgentError(e.to_string()))
    }
}

fn satisfaction_with_retry(
    agent: &dyn ScoringAgent,
    query: &ScoreQuery<'_>,
    retry: &RetryPolicy,
    run_index: u32,
) -> Result<f64, ScoringError> {
    let attempts = retry.max_attempts.max(1);
    let mut last_message = String::new();
    for attempt in 0..attempts {
        match agent.satisfaction(query) {
            Ok(value) => return Ok(value),
            Err(AgentError(message)) => {
                last_message = message;
                if attempt + 1 < attempts && !retry.base_delay.is_zero() {
                    std::thread::sleep(retry.base_delay * 2u32.pow(attempt));
                }
            }
        }
    }
    Err(ScoringError::AgentTransport {
        note_id: query.note_id.to_string(),
        run_index,
        criterion_index: query.criterion_index,
        attempts,
        message: last_message,
    })
}

/// Score one note against one rubric for `options.n_runs` independent runs.
///
/// Each run evaluates every criterion independently, checks the agent's
/// [0, 1] contract, and aggregates through [`compute_normalized_score`].
/// Returns exactly `n_runs` records with `run_index` 0..n_runs-1.
pub fn score_note(
    note: &NoteOutput,
    rubric: &Rubric,
    case: &Case,
    agent: &dyn ScoringAgent,
    options: &ScoreOptions,
) -> Result<Vec<ScoreRecord>, ScoringError> {
    if note.case_id != rubric.case_id || note.case_id != case.case_id {
        return Err(ScoringError::CaseMismatch {
            note_id: note.note_id.clone(),
            rubric_id: rubric.rubric_id.clone(),
            case_id: case.case_id.clone(),
        });
    }
    if rubric.criteria.is_empty() {
        return Err(ScoringError::EmptyCriteria);
    }
    let weights = rubric.weights();
    let mut records = Vec::with_capacity(options.n_runs as usize);
    for run_index in 0..options.n_runs {
        let mut satisfactions = Vec::with_capacity(rubric.criteria.len());
        for (criterion_index, criterion) in rubric.criteria.iter().enumerate() {
            let query = ScoreQuery {
                note_id: &note.note_id,
                note_content: &note.content,
                criterion_index,
                criterion,
                case,
            };
            let value = satisfaction_with_retry(agent, &query, &options.retry, run_index)?;
            if !(0.0..=1.0).contains(&value) {
                return Err(ScoringError::SatisfactionOutOfRange {
                    note_id: note.note_id.clone(),
                    run_index,
                    criterion_index,
                    value,
                });
            }
            satisfactions.push(value);
        }
        let normalized_score = compute_normalized_score(&satisfactions, &weights)?;
        records.push(ScoreRecord {
            note_id: note.note_id.clone(),
            rubric_id: rubric.rubric_id.clone(),
            run_index,
            satisfactions,
            normalized_score,
            scorer_id: agent.scorer_id().to_string(),
            created_at: options.created_at,
        });
    }
    Ok(records)
}

/// Max-minus-min spread of repeated scoring runs for one (note, rubric) pair,
/// in percentage points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityStat {
    pub note_id: String,
    pub rubric_id: String,
    pub n_runs: u32,
    pub score_range: f64,
}

/// Compute the stability range over at least two runs of one pair.
pub fn stability_range(records: &[ScoreRecord]) -> Result<StabilityStat, ScoringError> {
    if records.len() < 2 {
        return Err(ScoringError::TooFewRuns { got: records.len() });
    }
    let first = &records[0];
    for record in &records[1..] {
        if record.note_id != first.note_id || record.rubric_id != first.rubric_id {
            return Err(ScoringError::MixedKeys {
                expected_note: first.note_id.clone(),
                expected_rubric: first.rubric_id.clone(),
                note: record.note_id.clone(),
                rubric: record.rubric_id.clone(),
            });
        }
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for record in records {
        min = min.min(record.normalized_score);
        max = max.max(record.normalized_score);
    }
    Ok(StabilityStat {
        note_id: first.note_id.clone(),
        rubric_id: first.rubric_id.clone(),
        n_runs: records.len() as u32,
        score_range: max - min,
    })
}

/// Distribution of stability ranges across pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub median: f64,
    pub mean: f64,
    pub p95: f64,
}

pub fn stability_summary(ranges: &[StabilityStat]) -> Result<StabilitySummary, ScoringError> {
    if ranges.is_empty() {
        return Err(ScoringError::EmptyInput);
    }
    let values: Vec<f64> = ranges.iter().map(|s| s.score_range).collect();
    Ok(StabilitySummary {
        median: stats::median(&values).expect("non-empty"),
        mean: stats::mean(&values).expect("non-empty"),
        p95: stats::p95_nearest_rank(&values).expect("non-empty"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        CaseTags, CriterionKind, LongitudinalContext, RubricSource, RubricStatus, Turn, Vendor,
    };
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::atomic::{AtomicU32, Ordering};

    fn test_case(case_id: &str) -> Case {
        Case {
            case_id: case_id.to_string(),
            transcript: vec![Turn {
                speaker: "clinician".into(),
                text: "Blood pressure is stable on lisinopril.".into(),
            }],
            point_in_time_note: None,
            context: LongitudinalContext::default(),
            tags: CaseTags {
                specialty: "primary_care".into(),
                encounter_type: "follow_up".into(),
                length: crate::model::EncounterLength::Short,
                problem_count: crate::model::ProblemCount::Single,
                acuity: crate::model::Acuity::Low,
            },
            provenance: crate::model::Provenance::Synthetic,
        }
    }

    fn test_note(case_id: &str, content: &str) -> NoteOutput {
        NoteOutput {
            note_id: "note-1".into(),
            case_id: case_id.to_string(),
            experiment_id: "exp-1".into(),
            vendor: Vendor::Openai,
            generator_config: "model-a/prompt-v1".into(),
            content: content.to_string(),
            label: None,
        }
    }

    fn test_rubric(case_id: &str, specs: &[(u32, &[&str])]) -> Rubric {
        let criteria = specs
            .iter()
            .enumerate()
            .map(|(i, (weight, evidence))| Criterion {
                text: format!("Reward for requirement {i}"),
                weight: *weight,
                kind: match i {
                    0 => CriterionKind::Completeness,
                    1 => CriterionKind::NonRepetition,
                    _ => CriterionKind::Other,
                },
                evidence: evidence.iter().map(|s| s.to_string()).collect(),
            })
            .collect();
        Rubric {
            rubric_id: "rub-1".into(),
            case_id: case_id.to_string(),
            source: RubricSource::Clinician,
            author_id: "clin-1".into(),
            criteria,
            status: RubricStatus::Validated,
        }
    }

    #[test]
    fn normalized_score_identity_case() {
        assert_abs_diff_eq!(compute_normalized_score(&[1.0], &[1]).unwrap(), 100.0);
    }

    #[test]
    fn normalized_score_direct_evaluation() {
        let score = compute_normalized_score(&[1.0, 0.5, 0.0], &[3, 2, 5]).unwrap();
        assert_abs_diff_eq!(score, 40.0);
    }

    #[test]
    fn normalized_score_rejects_mismatched_lengths() {
        assert!(matches!(
            compute_normalized_score(&[1.0, 0.5], &[1]),
            Err(ScoringError::LengthMismatch { .. })
        ));
        assert!(matches!(
            compute_normalized_score(&[], &[]),
            Err(ScoringError::EmptyCriteria)
        ));
    }

    #[test]
    fn normalized_score_matches_naive_oracle() {
        // Independent route: naive per-term accumulation in a different order
        // (reverse), checked over randomized instances.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let n = rng.gen_range(1..12);
            let sats: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let weights: Vec<u32> = (0..n).map(|_| rng.gen_range(1..50)).collect();
            let got = compute_normalized_score(&sats, &weights).unwrap();
            let num: f64 = sats
                .iter()
                .zip(&weights)
                .rev()
                .map(|(s, w)| s * f64::from(*w))
                .sum();
            let den: f64 = weights.iter().rev().map(|w| f64::from(*w)).sum();
            assert_abs_diff_eq!(got, num / den * 100.0, epsilon = 1e-9);
            assert!((0.0..=100.0 + 1e-12).contains(&got));
        }
    }

    #[test]
    fn reference_satisfaction_ratios() {
        let evidence: Vec<String> = ["alpha", "beta", "gamma", "delta"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_abs_diff_eq!(
            reference_satisfaction("Alpha beta GAMMA delta", &evidence).unwrap(),
            1.0
        );
        assert_abs_diff_eq!(
            reference_satisfaction("only beta here", &evidence).unwrap(),
            0.25
        );
        assert!(matches!(
            reference_satisfaction("anything", &[]),
            Err(ScoringError::EmptyEvidence)
        ));
    }

    #[test]
    fn score_note_is_deterministic_across_runs() {
        let case = test_case("case-a");
        let note = test_note("case-a", "covers alpha and beta only");
        let rubric = test_rubric(
            "case-a",
            &[(3, &["alpha"][..]), (2, &["beta"][..]), (5, &["gamma"][..])],
        );
        let options = ScoreOptions::new(3, Utc::now());
        let records = score_note(&note, &rubric, &case, &ReferenceScorer, &options).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(
            records.iter().map(|r| r.run_index).collect::<Vec<_>>(),
            vec![0, 1, 2]
        );
        for record in &records {
            // (3*1 + 2*1 + 5*0) / 10 * 100 = 50
            assert_abs_diff_eq!(record.normalized_score, 50.0);
        }
    }

    #[test]
    fn score_note_hand_computed_five_criterion_fixture() {
        let case = test_case("case-a");
        let note = test_note(
            "case-a",
            "Documented lisinopril 10 mg and blood pressure 132/84; plan renewed.",
        );
        let rubric = test_rubric(
            "case-a",
            &[
                (4, &["lisinopril 10 mg", "blood pressure 132/84"][..]),
                (1, &["no repeated history"][..]),
                (2, &["plan renewed"][..]),
                (3, &["follow-up in 2 weeks", "a1c ordered"][..]),
                (2, &["smoking cessation"][..]),
            ],
        );
        let options = ScoreOptions::new(1, Utc::now());
        let records = score_note(&note, &rubric, &case, &ReferenceScorer, &options).unwrap();
        // Hand evaluation: s = [1.0, 0.0, 1.0, 0.0, 0.0], w = [4,1,2,3,2]
        // -> (4 + 0 + 2 + 0 + 0) / 12 * 100 = 50.0
        assert_abs_diff_eq!(records[0].normalized_score, 50.0, epsilon = 1e-12);
    }

    struct ConstantAgent(f64);
    impl ScoringAgent for ConstantAgent {
        fn scorer_id(&self) -> &str {
            "constant"
        }
        fn satisfaction(&self, _query: &ScoreQuery<'_>) -> Result<f64, AgentError> {
            Ok(self.0)
        }
    }

    #[test]
    fn score_note_rejects_out_of_range_agent() {
        let case = test_case("case-a");
        let note = test_note("case-a", "anything");
        let rubric = test_rubric("case-a", &[(1, &["x"][..]), (1, &["y"][..])]);
        let options = ScoreOptions::new(1, Utc::now());
        let err = score_note(&note, &rubric, &case, &ConstantAgent(1.2), &options).unwrap_err();
        assert!(matches!(
            err,
            ScoringError::SatisfactionOutOfRange { value, .. } if value == 1.2
        ));
    }

    #[test]
    fn score_note_rejects_mismatched_case() {
        let case = test_case("case-b");
        let note = test_note("case-a", "anything");
        let rubric = test_rubric("case-a", &[(1, &["x"][..]), (1, &["y"][..])]);
        let options = ScoreOptions::new(1, Utc::now());
        assert!(matches!(
            score_note(&note, &rubric, &case, &ReferenceScorer, &options),
            Err(ScoringError::CaseMismatch { .. })
        ));
    }

    struct FlakyAgent {
        failures_before_success: u32,
        calls: AtomicU32,
    }
    impl ScoringAgent for FlakyAgent {
        fn scorer_id(&self) -> &str {
            "flaky"
        }
        fn satisfaction(&self, _query: &ScoreQuery<'_>) -> Result<f64, AgentError> {
            let call = self.calls.fetch_add(1, Ordering::SeqCst);
            if call < self.failures_before_success {
                Err(AgentError("connection reset".into()))
            } else {
                Ok(0.5)
            }
        }
    }

    #[test]
    fn transport_failures_are_retried_then_succeed() {
        let case = test_case("case-a");
        let note = test_note("case-a", "anything");
        let rubric = test_rubric("case-a", &[(1, &["x"][..]), (1, &["y"][..])]);
        let agent = FlakyAgent {
            failures_before_success: 2,
            calls: AtomicU32::new(0),
        };
        let options = ScoreOptions {
            n_runs: 1,
            retry: RetryPolicy::immediate(3),
            created_at: Utc::now(),
        };
        let records = score_note(&note, &rubric, &case, &agent, &options).unwrap();
        assert_abs_diff_eq!(records[0].normalized_score, 50.0);
    }

    #[test]
    fn persistent_transport_failure_surfaces_run_index() {
        let case = test_case("case-a");
        let note = test_note("case-a", "anything");
        let rubric = test_rubric("case-a", &[(1, &["x"][..]), (1, &["y"][..])]);
        let agent = FlakyAgent {
            failures_before_success: u32::MAX,
            calls: AtomicU32::new(0),
        };
        let options = ScoreOptions {
            n_runs: 1,
            retry: RetryPolicy::immediate(3),
            created_at: Utc::now(),
        };
        let err = score_note(&note, &rubric, &case, &agent, &options).unwrap_err();
        assert!(matches!(
            err,
            ScoringError::AgentTransport {
                run_index: 0,
                attempts: 3,
                ..
            }
        ));
    }

    fn record(note: &str, rubric: &str, run: u32, score: f64) -> ScoreRecord {
        ScoreRecord {
            note_id: note.into(),
            rubric_id: rubric.into(),
            run_index: run,
            satisfactions: vec![score / 100.0],
            normalized_score: score,
            scorer_id: "t".into(),
            created_at: Utc::now(),
        }
    }

    #[test]
    fn stability_range_examples() {
        let stat =
            stability_range(&[record("n", "r", 0, 84.0), record("n", "r", 1, 84.0)]).unwrap();
        assert_eq!(stat.score_range, 0.0);
        let stat = stability_range(&[
            record("n", "r", 0, 80.0),
            record("n", "r", 1, 88.0),
            record("n", "r", 2, 84.0),
        ])
        .unwrap();
        assert_abs_diff_eq!(stat.score_range, 8.0);
    }

    #[test]
    fn stability_range_rejects_bad_input() {
        assert!(matches!(
            stability_range(&[record("n", "r", 0, 80.0)]),
            Err(ScoringError::TooFewRuns { got: 1 })
        ));
        assert!(matches!(
            stability_range(&[record("n", "r", 0, 80.0), record("m", "r", 1, 80.0)]),
            Err(ScoringError::MixedKeys { .. })
        ));
    }

    #[test]
    fn stability_ranges_match_sort_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for pair in 0..10 {
            let a = rng.gen_range(0.0..100.0);
            let b = rng.gen_range(0.0..100.0);
            let records = vec![
                record(&format!("n{pair}"), "r", 0, a),
                record(&format!("n{pair}"), "r", 1, b),
            ];
            let got = stability_range(&records).unwrap().score_range;
            let mut sorted = [a, b];
            sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
            assert_abs_diff_eq!(got, sorted[1] - sorted[0], epsilon = 1e-12);
        }
    }

    #[test]
    fn stability_summary_examples() {
        let all_zero: Vec<StabilityStat> = (0..5)
            .map(|i| StabilityStat {
                note_id: format!("n{i}"),
                rubric_id: "r".into(),
                n_runs: 2,
                score_range: 0.0,
            })
            .collect();
        let summary = stability_summary(&all_zero).unwrap();
        assert_eq!((summary.median, summary.mean, summary.p95), (0.0, 0.0, 0.0));

        let mut stats: Vec<StabilityStat> = (0..9)
            .map(|i| StabilityStat {
                note_id: format!("n{i}"),
                rubric_id: "r".into(),
                n_runs: 2,
                score_range: 0.0,
            })
            .collect();
        stats.push(StabilityStat {
            note_id: "n9".into(),
            rubric_id: "r".into(),
            n_runs: 2,
            score_range: 10.0,
        });
        let summary = stability_summary(&stats).unwrap();
        assert_eq!(summary.median, 0.0);
        assert_abs_diff_eq!(summary.mean, 1.0);
        assert_eq!(summary.p95, 10.0);

        let single = stability_summary(&stats[9..]).unwrap();
        assert_eq!((single.median, single.mean, single.p95), (10.0, 10.0, 10.0));
    }

    #[test]
    fn monotonicity_and_scale_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let n = rng.gen_range(1..10);
            let mut sats: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let weights: Vec<u32> = (0..n).map(|_| rng.gen_range(1..30)).collect();
            let base = compute_normalized_score(&sats, &weights).unwrap();

            let k = rng.gen_range(2..9u32);
            let scaled_weights: Vec<u32> = weights.iter().map(|w| w * k).collect();
            let scaled = compute_normalized_score(&sats, &scaled_weights).unwrap();
            assert_abs_diff_eq!(base, scaled, epsilon = 1e-9);

            let bump_index = rng.gen_range(0..n);
            sats[bump_index] = (sats[bump_index] + rng.gen_range(0.0..0.5)).min(1.0);
            let bumped = compute_normalized_score(&sats, &weights).unwrap();
            assert!(bumped >= base - 1e-12);
        }
    }
}
