//! Best/worst acceptance gate for clinician rubrics.
//!
//! A rubric passes only if, across three independent scoring runs, the
//! lowest score of the author's best-labeled note strictly exceeds the
//! highest score of the worst-labeled note. Ties at the boundary reject.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Case, LabelKind, NoteOutput, Rubric, RubricStatus};
use crate::scoring::{score_note, ScoreOptions, ScoringAgent, ScoringError, VALIDATION_RUNS};
use crate::stats;

#[derive(Debug, Error)]
pub enum GateError {
    #[error("expected exactly {VALIDATION_RUNS} {side} scores, got {got}")]
    WrongRunCount { side: &'static str, got: usize },
    #[error("no note labeled `{kind}` by `{labeler_id}` for case `{case_id}`")]
    MissingLabel {
        case_id: String,
        labeler_id: String,
        kind: LabelKind,
    },
    #[error("note `{note_id}` is labeled both best and worst for `{labeler_id}`")]
    LabelConflict { note_id: String, labeler_id: String },
    #[error("labeler `{labeler_id}` labeled more than one note `{kind}` for case `{case_id}`")]
    DuplicateLabel {
        case_id: String,
        labeler_id: String,
        kind: LabelKind,
    },
    #[error(transparent)]
    Scoring(#[from] ScoringError),
}

/// Outcome of one gate evaluation: extremes, margin, and the decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateDecision {
    pub min_best: f64,
    pub max_worst: f64,
    /// min_best - max_worst; positive exactly when accepted.
    pub separation_margin: f64,
    pub accepted: bool,
}

/// Apply the strict separation test to three scores per side.
pub fn evaluate_gate(best_scores: &[f64], worst_scores: &[f64]) -> Result<GateDecision, GateError> {
    if best_scores.len() != VALIDATION_RUNS as usize {
        return Err(GateError::WrongRunCount {
            side: "best",
            got: best_scores.len(),
        });
    }
    if worst_scores.len() != VALIDATION_RUNS as usize {
        return Err(GateError::WrongRunCount {
            side: "worst",
            got: worst_scores.len(),
        });
    }
    let min_best = best_scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_worst = worst_scores
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GateDecision {
        min_best,
        max_worst,
        separation_margin: min_best - max_worst,
        accepted: max_worst < min_best,
    })
}

/// Full record of one rubric validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub rubric_id: String,
    pub best_note_id: String,
    pub worst_note_id: String,
    pub best_scores: Vec<f64>,
    pub worst_scores: Vec<f64>,
    pub min_best: f64,
    pub max_worst: f64,
    pub separation_margin: f64,
    pub accepted: bool,
}

fn find_labeled<'a>(
    notes: &'a [NoteOutput],
    case_id: &str,
    labeler_id: &str,
    kind: LabelKind,
) -> Result<&'a NoteOutput, GateError> {
    let mut found: Option<&NoteOutput> = None;
    for note in notes.iter().filter(|n| n.case_id == case_id) {
        if let Some(label) = &note.label {
            if label.labeler_id == labeler_id && label.kind == kind {
                if found.is_some() {
                    return Err(GateError::DuplicateLabel {
                        case_id: case_id.to_string(),
                        labeler_id: labeler_id.to_string(),
                        kind,
                    });
                }
                found = Some(note);
            }
        }
    }
    found.ok_or_else(|| GateError::MissingLabel {
        case_id: case_id.to_string(),
        labeler_id: labeler_id.to_string(),
        kind,
    })
}

/// Validate one rubric against its author's best/worst labels.
///
/// Scores are computed fresh with three runs rather than reused from
/// experiment scoring. Returns the rubric with its status transitioned to
/// `validated` or `rejected`, the full [`ValidationResult`], and the score
/// records produced along the way. Re-validating a non-draft rubric is
/// permitted and overwrites its status.
pub fn run_validation(
    rubric: &Rubric,
    case: &Case,
    notes: &[NoteOutput],
    agent: &dyn ScoringAgent,
    options: &ScoreOptions,
) -> Result<(Rubric, ValidationResult, Vec<crate::model::ScoreRecord>), GateError> {
    let best = find_labeled(notes, &rubric.case_id, &rubric.author_id, LabelKind::Best)?;
    let worst = find_labeled(notes, &rubric.case_id, &rubric.author_id, LabelKind::Worst)?;
    if best.note_id == worst.note_id {
        return Err(GateError::LabelConflict {
            note_id: best.note_id.clone(),
            labeler_id: rubric.author_id.clone(),
        });
    }

    let options = ScoreOptions {
        n_runs: VALIDATION_RUNS,
        ..options.clone()
    };
    let best_records = score_note(best, rubric, case, agent, &options)?;
    let worst_records = score_note(worst, rubric, case, agent, &options)?;
    let best_scores: Vec<f64> = best_records.iter().map(|r| r.normalized_score).collect();
    let worst_scores: Vec<f64> = worst_records.iter().map(|r| r.normalized_score).collect();
    let decision = evaluate_gate(&best_scores, &worst_scores)?;

    let status = if decision.accepted {
        RubricStatus::Validated
    } else {
        RubricStatus::Rejected
    };
    let result = ValidationResult {
        rubric_id: rubric.rubric_id.clone(),
        best_note_id: best.note_id.clone(),
        worst_note_id: worst.note_id.clone(),
        best_scores,
        worst_scores,
        min_best: decision.min_best,
        max_worst: decision.max_worst,
        separation_margin: decision.separation_margin,
        accepted: decision.accepted,
    };
    let mut records = best_records;
    records.extend(worst_records);
    Ok((rubric.with_status(status), result, records))
}

/// Best-minus-worst score difference for one rubric.
pub fn discrimination_gap(best_score: f64, worst_score: f64) -> f64 {
    best_score - worst_score
}

/// Distribution of discrimination gaps across rubrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapSummary {
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
}

pub fn summarize_gaps(gaps: &[f64]) -> Option<GapSummary> {
    let (q1, median, q3) = stats::quartiles(gaps)?;
    Some(GapSummary {
        mean: stats::mean(gaps)?,
        median,
        q1,
        q3,
    })
}
