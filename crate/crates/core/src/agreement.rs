//! Rankings, tie-corrected Kendall tau, and convergence diagnostics.
//!
//! Method choices are fixed and surfaced in report footnotes: tau-b
//! (tie-corrected) over note rankings; average ranks for ties; fully tied
//! rankings produce an explicit no-value outcome that is excluded from
//! medians and counted.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::RubricSource;
use crate::stats::{self, FiveNumber};

#[derive(Debug, Error, PartialEq)]
pub enum AgreementError {
    #[error("empty input")]
    EmptyInput,
    #[error("rankings cover different item sets")]
    ItemSetMismatch,
    #[error("rank correlation needs at least 2 items, got {got}")]
    TooFewItems { got: usize },
}

/// Ranking of one case's notes under one rubric within one experiment.
/// Rank 1 is best; tied scores receive the average of the tied positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRanking {
    pub case_id: String,
    pub experiment_id: String,
    pub rubric_id: String,
    pub source: RubricSource,
    pub ranks: BTreeMap<String, f64>,
}

/// Descending-score average ranks: highest score gets rank 1, ties share the
/// mean of the positions they occupy.
pub fn rank_by_score(
    scores: &BTreeMap<String, f64>,
) -> Result<BTreeMap<String, f64>, AgreementError> {
    if scores.is_empty() {
        return Err(AgreementError::EmptyInput);
    }
    let mut entries: Vec<(&String, f64)> = scores.iter().map(|(k, &v)| (k, v)).collect();
    entries.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("finite scores")
            .then_with(|| a.0.cmp(b.0))
    });
    let mut ranks = BTreeMap::new();
    let n = entries.len();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && entries[j + 1].1 == entries[i].1 {
            j += 1;
        }
        // positions i+1 ..= j+1 share the average rank
        let average = (i + 1 + j + 1) as f64 / 2.0;
        for entry in &entries[i..=j] {
            ranks.insert(entry.0.clone(), average);
        }
        i = j + 1;
    }
    Ok(ranks)
}

fn tied_pair_count(sorted_values: &[f64]) -> f64 {
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted_values.len() {
        let mut j = i;
        while j + 1 < sorted_values.len() && sorted_values[j + 1] == sorted_values[i] {
            j += 1;
        }
        let group = (j - i + 1) as f64;
        ties += group * (group - 1.0) / 2.0;
        i = j + 1;
    }
    ties
}

/// Count strict inversions of `values` with a merge sort.
fn count_inversions(values: &mut [f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mut buffer = values.to_vec();
    let mut inversions = 0.0;
    let mut width = 1;
    while width < n {
        let mut lo = 0;
        while lo + width < n {
            let mid = lo + width;
            let hi = (mid + width).min(n);
            let (mut i, mut j, mut k) = (lo, mid, lo);
            while i < mid && j < hi {
                if values[j] < values[i] {
                    inversions += (mid - i) as f64;
                    buffer[k] = values[j];
                    j += 1;
                } else {
                    buffer[k] = values[i];
                    i += 1;
                }
                k += 1;
            }
            while i < mid {
                buffer[k] = values[i];
                i += 1;
                k += 1;
            }
            while j < hi {
                buffer[k] = values[j];
                j += 1;
                k += 1;
            }
            values[lo..hi].copy_from_slice(&buffer[lo..hi]);
            lo = hi;
        }
        width *= 2;
    }
    inversions
}

/// Tie-corrected Kendall tau over two aligned value vectors.
///
/// tau_b = (C - D) / sqrt((P - T_a)(P - T_b)) with P = n(n-1)/2 and T the
/// tied-pair counts within each vector. `Ok(None)` signals a degenerate
/// input (one side entirely tied), where the statistic is undefined.
pub fn kendall_tau_b_values(x: &[f64], y: &[f64]) -> Result<Option<f64>, AgreementError> {
    if x.len() != y.len() {
        return Err(AgreementError::ItemSetMismatch);
    }
    let n = x.len();
    if n < 2 {
        return Err(AgreementError::TooFewItems { got: n });
    }

    // Sort jointly by (x, y); discordant pairs are then exactly the strict
    // inversions of the y sequence.
    let mut pairs: Vec<(f64, f64)> = x.iter().cloned().zip(y.iter().cloned()).collect();
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite values")
            .then(a.1.partial_cmp(&b.1).expect("finite values"))
    });

    let total_pairs = (n * (n - 1)) as f64 / 2.0;

    let x_sorted: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let tied_x = tied_pair_count(&x_sorted);

    // Joint ties: pairs equal in both coordinates.
    let mut tied_xy = 0.0;
    {
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && pairs[j + 1] == pairs[i] {
                j += 1;
            }
            let group = (j - i + 1) as f64;
            tied_xy += group * (group - 1.0) / 2.0;
            i = j + 1;
        }
    }

    let mut y_in_x_order: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let discordant = count_inversions(&mut y_in_x_order);
    // y_in_x_order is now sorted by y.
    let tied_y = tied_pair_count(&y_in_x_order);

    let denominator = (total_pairs - tied_x) * (total_pairs - tied_y);
    if denominator <= 0.0 {
        return Ok(None);
    }

    let concordant_minus_discordant = total_pairs - tied_x - tied_y + tied_xy - 2.0 * discordant;
    Ok(Some(
        (concordant_minus_discordant / denominator.sqrt()).clamp(-1.0, 1.0),
    ))
}

fn aligned_values(
    a: &BTreeMap<String, f64>,
    b: &BTreeMap<String, f64>,
) -> Result<(Vec<f64>, Vec<f64>), AgreementError> {
    if a.len() != b.len() || !a.keys().eq(b.keys()) {
        return Err(AgreementError::ItemSetMismatch);
    }
    Ok((a.values().cloned().collect(), b.values().cloned().collect()))
}

/// Kendall tau-b between two rankings over the same item set.
pub fn kendall_tau_b(
    ranks_a: &BTreeMap<String, f64>,
    ranks_b: &BTreeMap<String, f64>,
) -> Result<Option<f64>, AgreementError> {
    let (x, y) = aligned_values(ranks_a, ranks_b)?;
    kendall_tau_b_values(&x, &y)
}

/// Mean absolute per-item rank difference between two rankings.
pub fn mean_rank_difference(
    ranks_a: &BTreeMap<String, f64>,
    ranks_b: &BTreeMap<String, f64>,
) -> Result<f64, AgreementError> {
    let (x, y) = aligned_values(ranks_a, ranks_b)?;
    if x.is_empty() {
        return Err(AgreementError::EmptyInput);
    }
    Ok(x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum::<f64>() / x.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    ClinClin,
    ClinLlm,
}

impl std::fmt::Display for PairKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PairKind::ClinClin => "clin_clin",
            PairKind::ClinLlm => "clin_llm",
        })
    }
}

/// Agreement between two rubric sources on one case within one experiment.
/// `tau` is `None` when either ranking was fully tied (degenerate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRecord {
    pub case_id: String,
    pub experiment_id: String,
    pub pair_kind: PairKind,
    pub rubric_a: String,
    pub rubric_b: String,
    pub tau: Option<f64>,
    pub mean_rank_diff: f64,
    pub n_notes: usize,
}

/// Result of pairing the available rankings for one (case, experiment):
/// the computable records plus warnings for missing rubric sources.
#[derive(Debug, Clone, PartialEq)]
pub struct PairAgreements {
    pub records: Vec<AgreementRecord>,
    pub warnings: Vec<String>,
}

/// Pair every clinician ranking with every other clinician ranking
/// (clin_clin) and with every LLM ranking (clin_llm). With the standard
/// complement of two clinician rubrics and one LLM rubric this emits exactly
/// three records; missing sources shrink the set and add a warning.
pub fn pair_agreements(
    case_id: &str,
    experiment_id: &str,
    rankings: &[CaseRanking],
) -> Result<PairAgreements, AgreementError> {
    let mut clinician: Vec<&CaseRanking> = rankings
        .iter()
        .filter(|r| r.source == RubricSource::Clinician)
        .collect();
    let mut llm: Vec<&CaseRanking> = rankings
        .iter()
        .filter(|r| r.source == RubricSource::Llm)
        .collect();
    clinician.sort_by(|a, b| a.rubric_id.cmp(&b.rubric_id));
    llm.sort_by(|a, b| a.rubric_id.cmp(&b.rubric_id));

    let mut warnings = Vec::new();
    if clinician.len() < 2 {
        warnings.push(format!(
            "case `{case_id}` experiment `{experiment_id}`: {} clinician ranking(s); clin_clin agreement skipped",
            clinician.len()
        ));
    }
    if llm.is_empty() {
        warnings.push(format!(
            "case `{case_id}` experiment `{experiment_id}`: no llm ranking; clin_llm agreement skipped"
        ));
    }

    let mut records = Vec::new();
    let mut push_pair =
        |a: &CaseRanking, b: &CaseRanking, kind: PairKind| -> Result<(), AgreementError> {
            let tau = kendall_tau_b(&a.ranks, &b.ranks)?;
            let mean_rank_diff = mean_rank_difference(&a.ranks, &b.ranks)?;
            records.push(AgreementRecord {
                case_id: case_id.to_string(),
                experiment_id: experiment_id.to_string(),
                pair_kind: kind,
                rubric_a: a.rubric_id.clone(),
                rubric_b: b.rubric_id.clone(),
                tau,
                mean_rank_diff,
                n_notes: a.ranks.len(),
            });
            Ok(())
        };

    for i in 0..clinician.len() {
        for j in i + 1..clinician.len() {
            push_pair(clinician[i], clinician[j], PairKind::ClinClin)?;
        }
    }
    for c in &clinician {
        for l in &llm {
            push_pair(c, l, PairKind::ClinLlm)?;
        }
    }

    Ok(PairAgreements { records, warnings })
}

/// One row of the per-experiment convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub experiment_id: String,
    pub clin_clin_median_tau: Option<f64>,
    pub clin_llm_median_tau: Option<f64>,
    /// clin_llm - clin_clin median tau.
    pub delta: Option<f64>,
    pub clin_clin_count: usize,
    pub clin_llm_count: usize,
    /// Records whose tau was undefined (fully tied ranking) and therefore
    /// excluded from the medians.
    pub degenerate_excluded: usize,
    pub clin_clin_median_rank_diff: Option<f64>,
    pub clin_llm_median_rank_diff: Option<f64>,
}

/// Fold agreement records into per-experiment median taus.
///
/// Rows follow `experiment_order`; experiments present in the records but
/// absent from the order are appended alphabetically.
pub fn convergence_table(
    records: &[AgreementRecord],
    experiment_order: &[String],
) -> Result<Vec<ConvergenceRow>, AgreementError> {
    if records.is_empty() {
        return Err(AgreementError::EmptyInput);
    }
    let mut grouped: BTreeMap<&str, Vec<&AgreementRecord>> = BTreeMap::new();
    for record in records {
        grouped
            .entry(record.experiment_id.as_str())
            .or_default()
            .push(record);
    }
    let mut order: Vec<&str> = experiment_order
        .iter()
        .map(String::as_str)
        .filter(|e| grouped.contains_key(e))
        .collect();
    for key in grouped.keys() {
        if !experiment_order.iter().any(|e| e == key) {
            order.push(key);
        }
    }

    let mut rows = Vec::new();
    for experiment_id in order {
        let records = &grouped[experiment_id];
        let mut taus: BTreeMap<PairKind, Vec<f64>> = BTreeMap::new();
        let mut rank_diffs: BTreeMap<PairKind, Vec<f64>> = BTreeMap::new();
        let mut counts: BTreeMap<PairKind, usize> = BTreeMap::new();
        let mut degenerate = 0;
        for record in records {
            *counts.entry(record.pair_kind).or_default() += 1;
            rank_diffs
                .entry(record.pair_kind)
                .or_default()
                .push(record.mean_rank_diff);
            match record.tau {
                Some(tau) => taus.entry(record.pair_kind).or_default().push(tau),
                None => degenerate += 1,
            }
        }
        let median_of = |map: &BTreeMap<PairKind, Vec<f64>>, kind: PairKind| {
            map.get(&kind).and_then(|v| stats::median(v))
        };
        let clin_clin_median_tau = median_of(&taus, PairKind::ClinClin);
        let clin_llm_median_tau = median_of(&taus, PairKind::ClinLlm);
        rows.push(ConvergenceRow {
            experiment_id: experiment_id.to_string(),
            clin_clin_median_tau,
            clin_llm_median_tau,
            delta: match (clin_llm_median_tau, clin_clin_median_tau) {
                (Some(l), Some(c)) => Some(l - c),
                _ => None,
            },
            clin_clin_count: counts.get(&PairKind::ClinClin).copied().unwrap_or(0),
            clin_llm_count: counts.get(&PairKind::ClinLlm).copied().unwrap_or(0),
            degenerate_excluded: degenerate,
            clin_clin_median_rank_diff: median_of(&rank_diffs, PairKind::ClinClin),
            clin_llm_median_rank_diff: median_of(&rank_diffs, PairKind::ClinLlm),
        });
    }
    Ok(rows)
}

/// Distributional companions to the agreement metrics: score spread plus the
/// separation-margin quantiles of the experiment window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CeilingDiagnostics {
    pub stddev: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub median: f64,
    pub margin_quantiles: Option<FiveNumber>,
}

pub fn ceiling_diagnostics(
    scores: &[f64],
    margins: &[f64],
) -> Result<CeilingDiagnostics, AgreementError> {
    if scores.is_empty() {
        return Err(AgreementError::EmptyInput);
    }
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let (q1, median, q3) = stats::quartiles(&sorted).expect("non-empty");
    Ok(CeilingDiagnostics {
        stddev: stats::sample_stddev(&sorted).expect("non-empty"),
        q1,
        q3,
        iqr: q3 - q1,
        median,
        margin_quantiles: stats::five_number(margins),
    })
}
