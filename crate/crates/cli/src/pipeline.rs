//! Pipeline orchestration: stage sequencing, concurrency, artifact layout,
//! and failure categories.
//!
//! Artifact rules: `scores.jsonl` is append-only (re-scoring continues
//! `run_index` rather than mutating history); every other artifact is a
//! derived view rewritten on each run. With the reference scorer and a fresh
//! output directory, artifacts are byte-identical across re-runs and worker
//! counts once the run timestamp is pinned.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use chrono::{DateTime, Utc};
use rayon::prelude::*;

use caseval_core::aggregate::{labelings_from_notes, summarize_experiment, vendor_preference};
use caseval_core::agreement::{
    ceiling_diagnostics, convergence_table, pair_agreements, rank_by_score, AgreementRecord,
    CaseRanking, PairKind,
};
use caseval_core::cost::{clinician_cost, cost_ratio, llm_cost, ClinicianEffort, TokenSpend};
use caseval_core::gate::{run_validation, ValidationResult};
use caseval_core::generation::{
    generate_rubric, Completion, CompletionRequest, GenerationError, GenerationRequest,
    TextCompletionPort, TokenUsage,
};
use caseval_core::model::{NoteOutput, Rubric, RubricSource, RubricStatus, ScoreRecord};
use caseval_core::scoring::{
    score_note, stability_range, stability_summary, ScoreOptions, ScoringAgent, StabilityStat,
};
use caseval_core::stats;

use crate::dataset::{
    append_jsonl, load_dataset, load_scores, write_jsonl, write_rubric_doc, Dataset,
};
use crate::manifest::{Manifest, RunReducer};
use crate::report::{f2, f4, opt4, Table};
use crate::scorer::build_scorer;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Validate,
    Score,
    Agree,
    Summarize,
    GenRubrics,
    Cost,
    Full,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Validate => "validate",
            Mode::Score => "score",
            Mode::Agree => "agree",
            Mode::Summarize => "summarize",
            Mode::GenRubrics => "gen-rubrics",
            Mode::Cost => "cost",
            Mode::Full => "full",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Ingest,
    Scoring,
    Analytics,
    Io,
}

impl Category {
    pub fn exit_code(self) -> i32 {
        match self {
            Category::Ingest => 2,
            Category::Scoring => 3,
            Category::Analytics => 4,
            Category::Io => 5,
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Category::Ingest => "ingest",
            Category::Scoring => "scoring",
            Category::Analytics => "analytics",
            Category::Io => "io",
        })
    }
}

#[derive(Debug)]
pub struct PipelineError {
    pub category: Category,
    pub message: String,
}

impl PipelineError {
    pub fn ingest(message: impl Into<String>) -> Self {
        PipelineError {
            category: Category::Ingest,
            message: message.into(),
        }
    }
    pub fn scoring(message: impl Into<String>) -> Self {
        PipelineError {
            category: Category::Scoring,
            message: message.into(),
        }
    }
    pub fn analytics(message: impl Into<String>) -> Self {
        PipelineError {
            category: Category::Analytics,
            message: message.into(),
        }
    }
    pub fn io(message: impl Into<String>) -> Self {
        PipelineError {
            category: Category::Io,
            message: message.into(),
        }
    }
    pub fn exit_code(&self) -> i32 {
        self.category.exit_code()
    }
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} error: {}", self.category, self.message)
    }
}

impl std::error::Error for PipelineError {}

impl From<crate::dataset::IngestError> for PipelineError {
    fn from(error: crate::dataset::IngestError) -> Self {
        PipelineError::ingest(error.to_string())
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub seed: u64,
    /// Pinned run timestamp for reproducible replays; wall clock otherwise.
    pub timestamp: Option<DateTime<Utc>>,
}

#[derive(Debug, Default)]
pub struct RunSummary {
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
}

fn io_err(context: &str, error: std::io::Error) -> PipelineError {
    PipelineError::io(format!("{context}: {error}"))
}

/// Execute one pipeline mode against a manifest.
pub fn run(
    manifest: &Manifest,
    mode: Mode,
    options: &RunOptions,
) -> Result<RunSummary, PipelineError> {
    let mut pool_builder = rayon::ThreadPoolBuilder::new();
    if let Some(workers) = options.workers {
        pool_builder = pool_builder.num_threads(workers.max(1));
    }
    let pool = pool_builder
        .build()
        .map_err(|e| PipelineError::io(format!("worker pool: {e}")))?;
    pool.install(|| run_inner(manifest, mode, options))
}

fn run_inner(
    manifest: &Manifest,
    mode: Mode,
    options: &RunOptions,
) -> Result<RunSummary, PipelineError> {
    let mut summary = RunSummary::default();
    let created_at = options.timestamp.unwrap_or_else(Utc::now);
    let out = manifest.output_dir.as_path();
    std::fs::create_dir_all(out).map_err(|e| io_err("create output dir", e))?;

    if mode == Mode::Cost {
        stage_cost(manifest, out, &mut summary)?;
        write_run_meta(manifest, mode, options, created_at, &summary)?;
        return Ok(summary);
    }

    let mut dataset = load_dataset(manifest)?;
    summary.lines.push(format!(
        "loaded {} cases, {} rubrics, {} notes",
        dataset.cases.len(),
        dataset.rubrics.len(),
        dataset.notes.len()
    ));

    if mode == Mode::GenRubrics {
        stage_gen(&dataset, manifest, out, &mut summary)?;
        write_run_meta(manifest, mode, options, created_at, &summary)?;
        return Ok(summary);
    }

    let validations: Vec<ValidationResult>;
    match mode {
        Mode::Validate | Mode::Full => {
            let agent = build_scorer(&manifest.scorer)?;
            validations =
                stage_validate(&mut dataset, agent.as_ref(), created_at, out, &mut summary)?;
        }
        _ => {
            validations = load_validation_results(out)?;
            apply_validation_statuses(&mut dataset, &validations);
        }
    }

    let mut scores: Vec<ScoreRecord> = Vec::new();
    match mode {
        Mode::Score | Mode::Full => {
            let agent = build_scorer(&manifest.scorer)?;
            scores = stage_score(
                &dataset,
                agent.as_ref(),
                manifest,
                created_at,
                out,
                &mut summary,
            )?;
        }
        Mode::Agree | Mode::Summarize => {
            scores = load_scores(&out.join("scores.jsonl"))
                .map_err(|e| PipelineError::io(e.to_string()))?;
            if scores.is_empty() {
                return Err(PipelineError::analytics(
                    "no score records in the output directory; run `score` first",
                ));
            }
            verify_score_store(&dataset, &scores)?;
        }
        _ => {}
    }

    if matches!(mode, Mode::Agree | Mode::Full) {
        stage_agree(&dataset, &scores, &validations, manifest, out, &mut summary)?;
    }
    if matches!(mode, Mode::Summarize | Mode::Full) {
        stage_summarize(&dataset, &scores, manifest, out, &mut summary)?;
    }
    if mode == Mode::Full {
        if manifest.costs.is_some() {
            stage_cost(manifest, out, &mut summary)?;
        } else {
            summary
                .lines
                .push("no [costs] section in manifest; cost report skipped".to_string());
        }
    }

    write_run_meta(manifest, mode, options, created_at, &summary)?;
    Ok(summary)
}

fn write_run_meta(
    manifest: &Manifest,
    mode: Mode,
    options: &RunOptions,
    created_at: DateTime<Utc>,
    summary: &RunSummary,
) -> Result<(), PipelineError> {
    let meta = serde_json::json!({
        "mode": mode.to_string(),
        "workers": options.workers,
        "seed": options.seed,
        "timestamp": created_at.to_rfc3339(),
        "warnings": summary.warnings,
    });
    std::fs::write(
        manifest.output_dir.join("run_meta.json"),
        serde_json::to_string_pretty(&meta).expect("serializable meta") + "\n",
    )
    .map_err(|e| io_err("write run_meta.json", e))
}

// ---------------------------------------------------------------------------
// Validation stage
// ---------------------------------------------------------------------------

fn load_validation_results(out: &Path) -> Result<Vec<ValidationResult>, PipelineError> {
    let path = out.join("validation_results.jsonl");
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(&path).map_err(|e| io_err("read validation results", e))?;
    let mut results = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        results.push(
            serde_json::from_str(line)
                .map_err(|e| PipelineError::io(format!("validation_results.jsonl: {e}")))?,
        );
    }
    Ok(results)
}

fn apply_validation_statuses(dataset: &mut Dataset, validations: &[ValidationResult]) {
    for result in validations {
        if let Some(rubric) = dataset.rubrics.get_mut(&result.rubric_id) {
            rubric.status = if result.accepted {
                RubricStatus::Validated
            } else {
                RubricStatus::Rejected
            };
        }
    }
}

fn stage_validate(
    dataset: &mut Dataset,
    agent: &dyn ScoringAgent,
    created_at: DateTime<Utc>,
    out: &Path,
    summary: &mut RunSummary,
) -> Result<Vec<ValidationResult>, PipelineError> {
    let rubric_ids: Vec<String> = dataset
        .rubrics
        .values()
        .filter(|r| r.source == RubricSource::Clinician)
        .map(|r| r.rubric_id.clone())
        .collect();
    let notes_by_case: BTreeMap<&str, Vec<&NoteOutput>> = {
        let mut map: BTreeMap<&str, Vec<&NoteOutput>> = BTreeMap::new();
        for note in dataset.notes.values() {
            map.entry(note.case_id.as_str()).or_default().push(note);
        }
        map
    };

    let options = ScoreOptions::new(caseval_core::scoring::VALIDATION_RUNS, created_at);
    let outcomes: Vec<_> = rubric_ids
        .par_iter()
        .map(|rubric_id| {
            let rubric = &dataset.rubrics[rubric_id];
            let case = &dataset.cases[&rubric.case_id];
            let notes: Vec<NoteOutput> = notes_by_case
                .get(rubric.case_id.as_str())
                .map(|v| v.iter().map(|n| (*n).clone()).collect())
                .unwrap_or_default();
            run_validation(rubric, case, &notes, agent, &options)
        })
        .collect();

    let mut results = Vec::new();
    let mut failures = Vec::new();
    let mut updated = Vec::new();
    for (rubric_id, outcome) in rubric_ids.iter().zip(outcomes) {
        match outcome {
            Ok((rubric, result, _records)) => {
                updated.push(rubric);
                results.push(result);
            }
            Err(error) => failures.push(format!("{rubric_id}: {error}")),
        }
    }
    for rubric in updated {
        dataset.rubrics.insert(rubric.rubric_id.clone(), rubric);
    }

    write_jsonl(&out.join("validation_results.jsonl"), &results)
        .map_err(|e| io_err("write validation_results.jsonl", e))?;

    let margin_by_rubric: BTreeMap<&str, f64> = results
        .iter()
        .map(|r| (r.rubric_id.as_str(), r.separation_margin))
        .collect();
    let mut status_table = Table::new(
        "Rubric validation status",
        &["rubric_id", "source", "status", "separation_margin"],
    );
    for rubric in dataset.rubrics.values() {
        status_table.push_row(vec![
            rubric.rubric_id.clone(),
            rubric.source.to_string(),
            rubric.status.to_string(),
            margin_by_rubric
                .get(rubric.rubric_id.as_str())
                .map(|m| f4(*m))
                .unwrap_or_default(),
        ]);
    }
    status_table.push_footnote(
        "margin: min best-note run score minus max worst-note run score across 3 runs",
    );
    status_table
        .push_footnote("llm-sourced rubrics bypass the best/worst gate and carry no margin");
    status_table
        .write_to(out, "rubric_status")
        .map_err(|e| io_err("write rubric_status", e))?;

    let mut gap_table = Table::new(
        "Discrimination gaps by rubric",
        &["rubric_id", "best_note_id", "worst_note_id", "gap"],
    );
    let mut gaps = Vec::new();
    for result in &results {
        let mean = |scores: &[f64]| scores.iter().sum::<f64>() / scores.len() as f64;
        let gap = caseval_core::gate::discrimination_gap(
            mean(&result.best_scores),
            mean(&result.worst_scores),
        );
        gaps.push(gap);
        gap_table.push_row(vec![
            result.rubric_id.clone(),
            result.best_note_id.clone(),
            result.worst_note_id.clone(),
            f4(gap),
        ]);
    }
    gap_table.push_footnote(
        "gap: mean of best-note runs minus mean of worst-note runs on the author's rubric",
    );
    gap_table
        .write_to(out, "discrimination")
        .map_err(|e| io_err("write discrimination", e))?;

    if let Some(gap_summary) = caseval_core::gate::summarize_gaps(&gaps) {
        let mut table = Table::new(
            "Discrimination gap summary",
            &["n_rubrics", "mean", "median", "q1", "q3"],
        );
        table.push_row(vec![
            gaps.len().to_string(),
            f4(gap_summary.mean),
            f4(gap_summary.median),
            f4(gap_summary.q1),
            f4(gap_summary.q3),
        ]);
        table.push_footnote("gap statistics across all gated rubrics (accepted and rejected)");
        table
            .write_to(out, "discrimination_summary")
            .map_err(|e| io_err("write discrimination_summary", e))?;
    }

    let accepted = results.iter().filter(|r| r.accepted).count();
    summary.lines.push(format!(
        "validated {} rubrics ({} accepted, {} rejected)",
        results.len(),
        accepted,
        results.len() - accepted
    ));

    if !failures.is_empty() {
        summary.warnings.extend(failures.iter().cloned());
        return Err(PipelineError::scoring(format!(
            "{} of {} validations failed; first: {}",
            failures.len(),
            rubric_ids.len(),
            failures[0]
        )));
    }
    Ok(results)
}

// ---------------------------------------------------------------------------
// Scoring stage
// ---------------------------------------------------------------------------

fn stage_score(
    dataset: &Dataset,
    agent: &dyn ScoringAgent,
    manifest: &Manifest,
    created_at: DateTime<Utc>,
    out: &Path,
    summary: &mut RunSummary,
) -> Result<Vec<ScoreRecord>, PipelineError> {
    let store_path = out.join("scores.jsonl");
    let existing = load_scores(&store_path).map_err(|e| PipelineError::io(e.to_string()))?;
    let mut next_run: BTreeMap<(String, String), u32> = BTreeMap::new();
    for record in &existing {
        let entry = next_run
            .entry((record.note_id.clone(), record.rubric_id.clone()))
            .or_default();
        *entry = (*entry).max(record.run_index + 1);
    }

    let mut tasks: Vec<(&Rubric, &NoteOutput, u32)> = Vec::new();
    for case_id in dataset.cases.keys() {
        let rubrics: Vec<&Rubric> = dataset
            .case_rubrics(case_id)
            .filter(|r| r.status == RubricStatus::Validated)
            .collect();
        for rubric in rubrics {
            for note in dataset.case_notes(case_id) {
                let base = next_run
                    .get(&(note.note_id.clone(), rubric.rubric_id.clone()))
                    .copied()
                    .unwrap_or(0);
                tasks.push((rubric, note, base));
            }
        }
    }

    let options = ScoreOptions::new(manifest.analysis.runs_per_rubric, created_at);
    let outcomes: Vec<_> = tasks
        .par_iter()
        .map(|(rubric, note, base)| {
            let case = &dataset.cases[&rubric.case_id];
            score_note(note, rubric, case, agent, &options).map(|mut records| {
                for record in &mut records {
                    record.run_index += base;
                }
                records
            })
        })
        .collect();

    let mut new_records = Vec::new();
    let mut failures = Vec::new();
    for ((rubric, note, _), outcome) in tasks.iter().zip(outcomes) {
        match outcome {
            Ok(records) => new_records.extend(records),
            Err(error) => failures.push(format!(
                "note `{}` vs rubric `{}`: {error}",
                note.note_id, rubric.rubric_id
            )),
        }
    }

    append_jsonl(&store_path, &new_records).map_err(|e| io_err("append scores.jsonl", e))?;

    let mut store = existing;
    store.extend(new_records.iter().cloned());
    write_stability(&store, out, summary)?;

    summary.lines.push(format!(
        "scored {} new records ({} total in store)",
        new_records.len(),
        store.len()
    ));

    if !failures.is_empty() {
        summary.warnings.extend(failures.iter().cloned());
        return Err(PipelineError::scoring(format!(
            "{} of {} scoring units failed; first: {}",
            failures.len(),
            tasks.len(),
            failures[0]
        )));
    }
    Ok(store)
}

fn write_stability(
    store: &[ScoreRecord],
    out: &Path,
    summary: &mut RunSummary,
) -> Result<(), PipelineError> {
    let mut by_pair: BTreeMap<(String, String), Vec<ScoreRecord>> = BTreeMap::new();
    for record in store {
        by_pair
            .entry((record.note_id.clone(), record.rubric_id.clone()))
            .or_default()
            .push(record.clone());
    }
    let mut stats_rows: Vec<StabilityStat> = Vec::new();
    for ((note_id, rubric_id), records) in &by_pair {
        match stability_range(records) {
            Ok(stat) => stats_rows.push(stat),
            Err(error) => summary.warnings.push(format!(
                "stability skipped for ({note_id}, {rubric_id}): {error}"
            )),
        }
    }

    let mut table = Table::new(
        "Scoring stability by pair",
        &["note_id", "rubric_id", "n_runs", "score_range"],
    );
    for stat in &stats_rows {
        table.push_row(vec![
            stat.note_id.clone(),
            stat.rubric_id.clone(),
            stat.n_runs.to_string(),
            f4(stat.score_range),
        ]);
    }
    table.push_footnote(
        "range: max minus min normalized score across runs of one (note, rubric) pair",
    );
    table
        .write_to(out, "stability")
        .map_err(|e| io_err("write stability", e))?;

    if let Ok(stability) = stability_summary(&stats_rows) {
        let mut table = Table::new(
            "Scoring stability summary",
            &["n_pairs", "median", "mean", "p95"],
        );
        table.push_row(vec![
            stats_rows.len().to_string(),
            f4(stability.median),
            f4(stability.mean),
            f4(stability.p95),
        ]);
        table.push_footnote("p95: nearest-rank percentile over pair ranges");
        table
            .write_to(out, "stability_summary")
            .map_err(|e| io_err("write stability_summary", e))?;
    }
    Ok(())
}

/// Reloaded score records must still satisfy their invariants: satisfaction
/// vectors aligned with the rubric's criteria and the stored normalized
/// score consistent with the weighted aggregation to within 1e-9.
fn verify_score_store(dataset: &Dataset, scores: &[ScoreRecord]) -> Result<(), PipelineError> {
    for record in scores {
        let rubric = dataset.rubrics.get(&record.rubric_id).ok_or_else(|| {
            PipelineError::analytics(format!(
                "score store references unknown rubric `{}`",
                record.rubric_id
            ))
        })?;
        if !dataset.notes.contains_key(&record.note_id) {
            return Err(PipelineError::analytics(format!(
                "score store references unknown note `{}`",
                record.note_id
            )));
        }
        if record.satisfactions.len() != rubric.criteria.len() {
            return Err(PipelineError::analytics(format!(
                "score record ({}, {}, run {}) has {} satisfactions for {} criteria",
                record.note_id,
                record.rubric_id,
                record.run_index,
                record.satisfactions.len(),
                rubric.criteria.len()
            )));
        }
        let recomputed =
            caseval_core::scoring::compute_normalized_score(&record.satisfactions, &rubric.weights())
                .map_err(|e| PipelineError::analytics(e.to_string()))?;
        if (recomputed - record.normalized_score).abs() > 1e-9 {
            return Err(PipelineError::analytics(format!(
                "score record ({}, {}, run {}) stores {} but its satisfactions aggregate to {}",
                record.note_id,
                record.rubric_id,
                record.run_index,
                record.normalized_score,
                recomputed
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Agreement stage
// ---------------------------------------------------------------------------

fn reduce_runs(values: &[f64], reducer: RunReducer) -> f64 {
    match reducer {
        RunReducer::Mean => stats::mean(values).expect("non-empty runs"),
        RunReducer::Median => stats::median(values).expect("non-empty runs"),
    }
}

fn stage_agree(
    dataset: &Dataset,
    scores: &[ScoreRecord],
    validations: &[ValidationResult],
    manifest: &Manifest,
    out: &Path,
    summary: &mut RunSummary,
) -> Result<(), PipelineError> {
    if scores.is_empty() {
        return Err(PipelineError::analytics("no score records to analyze"));
    }
    let mut runs: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
    for record in scores {
        runs.entry((record.note_id.as_str(), record.rubric_id.as_str()))
            .or_default()
            .push(record.normalized_score);
    }
    let reduced: BTreeMap<(&str, &str), f64> = runs
        .iter()
        .map(|(key, values)| (*key, reduce_runs(values, manifest.analysis.run_reducer)))
        .collect();

    let mut records: Vec<AgreementRecord> = Vec::new();
    for experiment_id in &manifest.experiments {
        for case_id in dataset.cases.keys() {
            let group: Vec<&NoteOutput> = dataset
                .case_notes(case_id)
                .filter(|n| &n.experiment_id == experiment_id)
                .collect();
            if group.is_empty() {
                continue;
            }
            let mut rankings: Vec<CaseRanking> = Vec::new();
            for rubric in dataset
                .case_rubrics(case_id)
                .filter(|r| r.status == RubricStatus::Validated)
            {
                let mut score_map = BTreeMap::new();
                let mut complete = true;
                for note in &group {
                    match reduced.get(&(note.note_id.as_str(), rubric.rubric_id.as_str())) {
                        Some(value) => {
                            score_map.insert(note.note_id.clone(), *value);
                        }
                        None => {
                            complete = false;
                            break;
                        }
                    }
                }
                if !complete {
                    summary.warnings.push(format!(
                        "ranking skipped: rubric `{}` lacks scores for every note of ({case_id}, {experiment_id})",
                        rubric.rubric_id
                    ));
                    continue;
                }
                let ranks = rank_by_score(&score_map)
                    .map_err(|e| PipelineError::analytics(e.to_string()))?;
                rankings.push(CaseRanking {
                    case_id: case_id.clone(),
                    experiment_id: experiment_id.clone(),
                    rubric_id: rubric.rubric_id.clone(),
                    source: rubric.source,
                    ranks,
                });
            }
            let pairing = pair_agreements(case_id, experiment_id, &rankings)
                .map_err(|e| PipelineError::analytics(e.to_string()))?;
            summary.warnings.extend(pairing.warnings);
            records.extend(pairing.records);
        }
    }
    records.sort_by(|a, b| {
        (
            &a.experiment_id,
            &a.case_id,
            a.pair_kind,
            &a.rubric_a,
            &a.rubric_b,
        )
            .cmp(&(
                &b.experiment_id,
                &b.case_id,
                b.pair_kind,
                &b.rubric_a,
                &b.rubric_b,
            ))
    });

    write_jsonl(&out.join("agreement_records.jsonl"), &records)
        .map_err(|e| io_err("write agreement_records.jsonl", e))?;

    let rows = convergence_table(&records, &manifest.experiments)
        .map_err(|e| PipelineError::analytics(e.to_string()))?;

    let mut table3 = Table::new(
        "Kendall tau convergence by experiment",
        &[
            "experiment",
            "clin_clin_median_tau",
            "clin_llm_median_tau",
            "delta",
        ],
    );
    let mut exclusion_notes = Vec::new();
    for row in &rows {
        table3.push_row(vec![
            row.experiment_id.clone(),
            opt4(row.clin_clin_median_tau),
            opt4(row.clin_llm_median_tau),
            opt4(row.delta),
        ]);
        exclusion_notes.push(format!("{}={}", row.experiment_id, row.degenerate_excluded));
    }
    table3.push_footnote("tau: Kendall tau-b (tie-corrected) over per-case note rankings");
    table3.push_footnote(
        "rankings: mean of scoring runs per (note, rubric), descending, average ranks for ties",
    );
    table3.push_footnote(
        "clin_llm medians pool both clinician pairings; per-pair records in agreement_records.jsonl",
    );
    table3.push_footnote("delta: clin_llm median minus clin_clin median");
    table3.push_footnote(&format!(
        "degenerate rankings excluded from medians: {}",
        exclusion_notes.join("; ")
    ));
    table3
        .write_to(out, "table3")
        .map_err(|e| io_err("write table3", e))?;

    let mut detail = Table::new(
        "Agreement detail by experiment and pair kind",
        &[
            "experiment",
            "pair_kind",
            "n_records",
            "median_tau",
            "median_rank_diff",
            "degenerate_excluded",
        ],
    );
    for experiment_id in rows.iter().map(|r| &r.experiment_id) {
        for kind in [PairKind::ClinClin, PairKind::ClinLlm] {
            let of_kind: Vec<&AgreementRecord> = records
                .iter()
                .filter(|r| &r.experiment_id == experiment_id && r.pair_kind == kind)
                .collect();
            let taus: Vec<f64> = of_kind.iter().filter_map(|r| r.tau).collect();
            let diffs: Vec<f64> = of_kind.iter().map(|r| r.mean_rank_diff).collect();
            detail.push_row(vec![
                experiment_id.clone(),
                kind.to_string(),
                of_kind.len().to_string(),
                opt4(stats::median(&taus)),
                opt4(stats::median(&diffs)),
                (of_kind.len() - taus.len()).to_string(),
            ]);
        }
    }
    detail.push_footnote(
        "per-kind detail behind the convergence table; rank_diff: mean absolute rank difference per case",
    );
    detail
        .write_to(out, "agreement_detail")
        .map_err(|e| io_err("write agreement_detail", e))?;

    let experiment_of_note: BTreeMap<&str, &str> = dataset
        .notes
        .values()
        .map(|n| (n.note_id.as_str(), n.experiment_id.as_str()))
        .collect();
    let mut ceiling = Table::new(
        "Ceiling-compression diagnostics",
        &[
            "experiment",
            "median",
            "q1",
            "q3",
            "iqr",
            "stddev",
            "margin_min",
            "margin_q1",
            "margin_median",
            "margin_q3",
            "margin_max",
        ],
    );
    for experiment_id in &manifest.experiments {
        let experiment_scores: Vec<f64> = scores
            .iter()
            .filter(|r| experiment_of_note.get(r.note_id.as_str()) == Some(&experiment_id.as_str()))
            .map(|r| r.normalized_score)
            .collect();
        if experiment_scores.is_empty() {
            continue;
        }
        let margins: Vec<f64> = validations
            .iter()
            .filter(|v| {
                experiment_of_note.get(v.best_note_id.as_str()) == Some(&experiment_id.as_str())
            })
            .map(|v| v.separation_margin)
            .collect();
        let diagnostics = ceiling_diagnostics(&experiment_scores, &margins)
            .map_err(|e| PipelineError::analytics(e.to_string()))?;
        let mut row = vec![
            experiment_id.clone(),
            f2(diagnostics.median),
            f2(diagnostics.q1),
            f2(diagnostics.q3),
            f2(diagnostics.iqr),
            f2(diagnostics.stddev),
        ];
        match diagnostics.margin_quantiles {
            Some(q) => row.extend([f4(q.min), f4(q.q1), f4(q.median), f4(q.q3), f4(q.max)]),
            None => row.extend([
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
            ]),
        }
        ceiling.push_row(row);
    }
    ceiling.push_footnote(
        "score spread per experiment with separation-margin quantiles from gate validations in the window",
    );
    ceiling
        .push_footnote("empty margin cells: no gate validations used notes from this experiment");
    ceiling
        .write_to(out, "ceiling")
        .map_err(|e| io_err("write ceiling", e))?;

    let degenerate: usize = records.iter().filter(|r| r.tau.is_none()).count();
    summary.lines.push(format!(
        "agreement records: {} ({} degenerate rankings excluded)",
        records.len(),
        degenerate
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// Summary stage
// ---------------------------------------------------------------------------

fn stage_summarize(
    dataset: &Dataset,
    scores: &[ScoreRecord],
    manifest: &Manifest,
    out: &Path,
    summary: &mut RunSummary,
) -> Result<(), PipelineError> {
    if scores.is_empty() {
        return Err(PipelineError::analytics("no score records to summarize"));
    }
    let experiment_of_note: BTreeMap<&str, &str> = dataset
        .notes
        .values()
        .map(|n| (n.note_id.as_str(), n.experiment_id.as_str()))
        .collect();

    let mut table2 = Table::new(
        "Score distribution by experiment",
        &["experiment", "n_records", "median", "q1", "q3", "stddev"],
    );
    let mut quantiles = Table::new(
        "Score quantiles by experiment",
        &["experiment", "min", "q1", "median", "q3", "max"],
    );
    for experiment_id in &manifest.experiments {
        let values: Vec<f64> = scores
            .iter()
            .filter(|r| experiment_of_note.get(r.note_id.as_str()) == Some(&experiment_id.as_str()))
            .map(|r| r.normalized_score)
            .collect();
        if values.is_empty() {
            summary
                .warnings
                .push(format!("experiment `{experiment_id}` has no score records"));
            continue;
        }
        let experiment_summary = summarize_experiment(experiment_id, &values)
            .map_err(|e| PipelineError::analytics(e.to_string()))?;
        table2.push_row(vec![
            experiment_id.clone(),
            experiment_summary.n_records.to_string(),
            f2(experiment_summary.median),
            f2(experiment_summary.q1),
            f2(experiment_summary.q3),
            f2(experiment_summary.stddev),
        ]);
        let five = stats::five_number(&values).expect("non-empty");
        quantiles.push_row(vec![
            experiment_id.clone(),
            f2(five.min),
            f2(five.q1),
            f2(five.median),
            f2(five.q3),
            f2(five.max),
        ]);
    }
    table2
        .push_footnote("scores: normalized 0-100 scale; every scoring run contributes one record");
    table2.push_footnote(
        "quartiles: linear interpolation between order statistics; stddev: sample (n-1)",
    );
    table2
        .write_to(out, "table2")
        .map_err(|e| io_err("write table2", e))?;
    quantiles.push_footnote("five-number summaries of normalized scores for external box plots");
    quantiles
        .write_to(out, "quantiles")
        .map_err(|e| io_err("write quantiles", e))?;

    let notes: Vec<&NoteOutput> = dataset.notes.values().collect();
    let labelings = labelings_from_notes(notes.iter().copied());
    let all_vendors: BTreeSet<_> = notes.iter().map(|n| n.vendor).collect();
    let mut vendor_table = Table::new(
        "Vendor preference from best/worst labelings",
        &[
            "scope",
            "vendor",
            "times_evaluated",
            "pct_best",
            "pct_worst",
            "net_rate",
        ],
    );
    let mut skipped_vendors = BTreeSet::new();
    if !labelings.is_empty() {
        for (scope, multi_only) in [("when_evaluated", false), ("multi_vendor_only", true)] {
            let report = vendor_preference(&labelings, &all_vendors, multi_only)
                .map_err(|e| PipelineError::analytics(e.to_string()))?;
            for row in report.rows {
                vendor_table.push_row(vec![
                    scope.to_string(),
                    row.vendor.to_string(),
                    row.times_evaluated.to_string(),
                    f2(row.pct_best),
                    f2(row.pct_worst),
                    f2(row.net_rate),
                ]);
            }
            skipped_vendors.extend(report.skipped);
        }
    }
    vendor_table
        .push_footnote("when_evaluated: labelings in which the vendor had a candidate note");
    vendor_table.push_footnote(
        "multi_vendor_only: restricted to labelings whose candidates span multiple vendors",
    );
    vendor_table.push_footnote("net_rate: pct_best - pct_worst");
    if !skipped_vendors.is_empty() {
        let names: Vec<String> = skipped_vendors.iter().map(|v| v.to_string()).collect();
        vendor_table.push_footnote(&format!(
            "vendors never evaluated in a labeling, excluded: {}",
            names.join(", ")
        ));
    }
    vendor_table
        .write_to(out, "vendor_preference")
        .map_err(|e| io_err("write vendor_preference", e))?;

    summary.lines.push(format!(
        "summaries written for {} experiments",
        manifest.experiments.len()
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// Cost stage
// ---------------------------------------------------------------------------

fn stage_cost(
    manifest: &Manifest,
    out: &Path,
    summary: &mut RunSummary,
) -> Result<(), PipelineError> {
    let costs = manifest
        .costs
        .as_ref()
        .ok_or_else(|| PipelineError::ingest("manifest has no [costs] section"))?;

    let (total_hours, evaluators) = match (&costs.effort_path, costs.total_hours) {
        (Some(path), _) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| io_err("read effort records", e))?;
            let mut hours = 0.0;
            let mut count = 0usize;
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                let effort: ClinicianEffort = serde_json::from_str(line)
                    .map_err(|e| PipelineError::ingest(format!("effort records: {e}")))?;
                hours += effort.hours;
                count += 1;
            }
            (hours, Some(count))
        }
        (None, Some(hours)) => (hours, None),
        (None, None) => {
            return Err(PipelineError::ingest(
                "[costs] needs either effort_path or total_hours",
            ))
        }
    };

    let prices = crate::manifest::load_price_entry(&costs.prices_path, &costs.generation_model)?;
    let clinician = clinician_cost(total_hours, costs.accepted_rubrics, costs.hourly_rate)
        .map_err(|e| PipelineError::analytics(e.to_string()))?;
    let spend = TokenSpend {
        model_id: costs.generation_model.clone(),
        input_tokens: costs.input_tokens,
        output_tokens: costs.output_tokens,
        price_per_m_input: prices.price_per_m_input,
        price_per_m_output: prices.price_per_m_output,
        reasoning_multiplier: prices.reasoning_multiplier,
    };
    let llm = llm_cost(&spend, costs.generated_rubrics)
        .map_err(|e| PipelineError::analytics(e.to_string()))?;
    let ratio = cost_ratio(clinician.cost_per_rubric, llm.cost_per_rubric)
        .map_err(|e| PipelineError::analytics(e.to_string()))?;

    let mut table = Table::new("Evaluation cost ledger", &["metric", "value"]);
    table.push_row(vec!["clinician_total_hours".into(), f4(total_hours)]);
    if let Some(evaluators) = evaluators {
        table.push_row(vec!["clinician_evaluators".into(), evaluators.to_string()]);
    }
    table.push_row(vec![
        "accepted_rubrics".into(),
        costs.accepted_rubrics.to_string(),
    ]);
    if let Some(selected) = costs.selected_rubrics {
        table.push_row(vec!["selected_rubrics".into(), selected.to_string()]);
    }
    table.push_row(vec![
        "minutes_per_accepted_rubric".into(),
        f4(clinician.minutes_per_rubric),
    ]);
    table.push_row(vec![
        "clinician_cost_per_rubric".into(),
        f4(clinician.cost_per_rubric),
    ]);
    table.push_row(vec!["llm_model".into(), costs.generation_model.clone()]);
    table.push_row(vec![
        "llm_input_tokens".into(),
        costs.input_tokens.to_string(),
    ]);
    table.push_row(vec![
        "llm_output_tokens".into(),
        costs.output_tokens.to_string(),
    ]);
    table.push_row(vec![
        "reasoning_multiplier".into(),
        f4(spend.reasoning_multiplier),
    ]);
    table.push_row(vec![
        "price_per_m_input".into(),
        f4(spend.price_per_m_input),
    ]);
    table.push_row(vec![
        "price_per_m_output".into(),
        f4(spend.price_per_m_output),
    ]);
    table.push_row(vec!["llm_total_cost".into(), f4(llm.total_cost)]);
    table.push_row(vec![
        "llm_generated_rubrics".into(),
        costs.generated_rubrics.to_string(),
    ]);
    table.push_row(vec!["llm_cost_per_rubric".into(), f4(llm.cost_per_rubric)]);
    table.push_row(vec!["clinician_to_llm_cost_ratio".into(), f4(ratio)]);
    table.push_footnote(
        "token prices and reasoning multiplier are configuration assumptions, recorded with every total",
    );
    table.push_footnote(
        "accepted_rubrics counts gate-passing rubrics; selected_rubrics counts those chosen for use",
    );
    table
        .write_to(out, "cost_report")
        .map_err(|e| io_err("write cost_report", e))?;

    summary.lines.push(format!(
        "cost ledger: {} per clinician rubric vs {} per llm rubric (ratio {})",
        f4(clinician.cost_per_rubric),
        f4(llm.cost_per_rubric),
        f2(ratio)
    ));
    Ok(())
}

// ---------------------------------------------------------------------------
// Generation stage
// ---------------------------------------------------------------------------

/// Offline completion port that replays a canned response from a file.
struct FileStubPort {
    path: std::path::PathBuf,
    model_id: String,
}

#[derive(serde::Deserialize)]
struct CannedCompletion {
    text: String,
    input_tokens: u64,
    output_tokens: u64,
}

impl TextCompletionPort for FileStubPort {
    fn model_id(&self) -> &str {
        &self.model_id
    }

    fn complete(&self, _request: &CompletionRequest<'_>) -> Result<Completion, GenerationError> {
        let text = std::fs::read_to_string(&self.path)
            .map_err(|e| GenerationError::Port(format!("{}: {e}", self.path.display())))?;
        let canned: CannedCompletion = serde_json::from_str(&text)
            .map_err(|e| GenerationError::Port(format!("{}: {e}", self.path.display())))?;
        Ok(Completion {
            text: canned.text,
            usage: TokenUsage {
                input_tokens: canned.input_tokens,
                output_tokens: canned.output_tokens,
            },
        })
    }
}

fn stage_gen(
    dataset: &Dataset,
    manifest: &Manifest,
    out: &Path,
    summary: &mut RunSummary,
) -> Result<(), PipelineError> {
    let config = manifest
        .generation
        .as_ref()
        .ok_or_else(|| PipelineError::ingest("manifest has no [generation] section"))?;
    let template = std::fs::read_to_string(&config.template_path)
        .map_err(|e| io_err("read generation template", e))?;
    let generated_dir = out.join("generated_rubrics");
    std::fs::create_dir_all(&generated_dir).map_err(|e| io_err("create generated_rubrics", e))?;

    let case_ids: Vec<&String> = dataset.cases.keys().collect();
    let outcomes: Vec<_> = case_ids
        .par_iter()
        .map(|case_id| {
            let case = &dataset.cases[*case_id];
            let port = FileStubPort {
                path: config.canned_dir.join(format!("{case_id}.json")),
                model_id: config.model_id.clone(),
            };
            generate_rubric(case, &port, &template, config.max_attempts)
        })
        .collect();

    let mut requests: Vec<GenerationRequest> = Vec::new();
    let mut failures = Vec::new();
    for (case_id, outcome) in case_ids.iter().zip(outcomes) {
        match outcome {
            Ok(result) => {
                write_rubric_doc(&generated_dir, &result.rubric)
                    .map_err(|e| io_err("write generated rubric", e))?;
                requests.push(result.request);
            }
            Err(error) => failures.push(format!("{case_id}: {error}")),
        }
    }
    write_jsonl(&out.join("generation_requests.jsonl"), &requests)
        .map_err(|e| io_err("write generation_requests.jsonl", e))?;

    let usage: (u64, u64) = requests.iter().fold((0, 0), |acc, r| {
        (
            acc.0 + r.token_usage.input_tokens,
            acc.1 + r.token_usage.output_tokens,
        )
    });
    summary.lines.push(format!(
        "generated {} rubrics ({} input tokens, {} output tokens)",
        requests.len(),
        usage.0,
        usage.1
    ));

    if !failures.is_empty() {
        summary.warnings.extend(failures.iter().cloned());
        return Err(PipelineError::scoring(format!(
            "{} of {} generations failed; first: {}",
            failures.len(),
            case_ids.len(),
            failures[0]
        )));
    }
    Ok(())
}
