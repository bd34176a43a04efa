//! Per-experiment score summaries and vendor preference rates.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{LabelKind, NoteOutput, Vendor};
use crate::stats;

#[derive(Debug, Error, PartialEq)]
pub enum AggregateError {
    #[error("empty input")]
    EmptyInput,
}

/// Distribution of all normalized scores within one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment_id: String,
    pub n_records: usize,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub stddev: f64,
}

/// Summarize an experiment using the shared quartile and stddev conventions.
pub fn summarize_experiment(
    experiment_id: &str,
    scores: &[f64],
) -> Result<ExperimentSummary, AggregateError> {
    // Sorting first makes the summary exactly permutation-invariant; the
    // running-variance accumulation is otherwise order-sensitive in the last
    // bits.
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
    let (q1, median, q3) = stats::quartiles(&sorted).ok_or(AggregateError::EmptyInput)?;
    Ok(ExperimentSummary {
        experiment_id: experiment_id.to_string(),
        n_records: sorted.len(),
        median,
        q1,
        q3,
        stddev: stats::sample_stddev(&sorted).expect("non-empty"),
    })
}

/// One labeling event: a labeler's best/worst picks over the candidate notes
/// of one (case, experiment) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labeling {
    pub case_id: String,
    pub experiment_id: String,
    pub labeler_id: String,
    pub candidate_vendors: BTreeSet<Vendor>,
    pub best_vendor: Option<Vendor>,
    pub worst_vendor: Option<Vendor>,
}

/// Derive labeling events from labeled notes. Candidates are all notes that
/// share the labeled note's (case, experiment) group.
pub fn labelings_from_notes<'a, I>(notes: I) -> Vec<Labeling>
where
    I: IntoIterator<Item = &'a NoteOutput>,
{
    let mut groups: BTreeMap<(String, String), Vec<&NoteOutput>> = BTreeMap::new();
    for note in notes {
        groups
            .entry((note.case_id.clone(), note.experiment_id.clone()))
            .or_default()
            .push(note);
    }
    let mut labelings = Vec::new();
    for ((case_id, experiment_id), group) in groups {
        let vendors: BTreeSet<Vendor> = group.iter().map(|n| n.vendor).collect();
        let mut by_labeler: BTreeMap<&str, (Option<Vendor>, Option<Vendor>)> = BTreeMap::new();
        for note in &group {
            if let Some(label) = &note.label {
                let entry = by_labeler.entry(label.labeler_id.as_str()).or_default();
                match label.kind {
                    LabelKind::Best => entry.0 = Some(note.vendor),
                    LabelKind::Worst => entry.1 = Some(note.vendor),
                }
            }
        }
        for (labeler_id, (best_vendor, worst_vendor)) in by_labeler {
            labelings.push(Labeling {
                case_id: case_id.clone(),
                experiment_id: experiment_id.clone(),
                labeler_id: labeler_id.to_string(),
                candidate_vendors: vendors.clone(),
                best_vendor,
                worst_vendor,
            });
        }
    }
    labelings
}

/// Preference statistics for one vendor. The denominators are the labeling
/// events in which the vendor had at least one candidate note ("when
/// evaluated").
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VendorPreference {
    pub vendor: Vendor,
    pub times_evaluated: usize,
    pub pct_best: f64,
    pub pct_worst: f64,
    /// pct_best - pct_worst, in [-100, 100].
    pub net_rate: f64,
}

impl VendorPreference {
    /// Build a row from already-known percentages.
    pub fn from_percentages(
        vendor: Vendor,
        times_evaluated: usize,
        pct_best: f64,
        pct_worst: f64,
    ) -> VendorPreference {
        VendorPreference {
            vendor,
            times_evaluated,
            pct_best,
            pct_worst,
            net_rate: pct_best - pct_worst,
        }
    }
}

/// Vendor rows plus the vendors present in the note pool but never part of a
/// labeled candidate set (excluded with a warning rather than divided by
/// zero).
#[derive(Debug, Clone, PartialEq)]
pub struct VendorPreferenceReport {
    pub rows: Vec<VendorPreference>,
    pub skipped: Vec<Vendor>,
}

/// Compute vendor preference rates over labeling events.
///
/// With `require_multiple_vendors` the denominator is restricted to events
/// whose candidate set spans more than one vendor, the stricter variant of
/// the "when evaluated" rule.
pub fn vendor_preference(
    labelings: &[Labeling],
    all_note_vendors: &BTreeSet<Vendor>,
    require_multiple_vendors: bool,
) -> Result<VendorPreferenceReport, AggregateError> {
    if labelings.is_empty() {
        return Err(AggregateError::EmptyInput);
    }
    let eligible: Vec<&Labeling> = labelings
        .iter()
        .filter(|l| !require_multiple_vendors || l.candidate_vendors.len() > 1)
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &vendor in all_note_vendors {
        let evaluated: Vec<&&Labeling> = eligible
            .iter()
            .filter(|l| l.candidate_vendors.contains(&vendor))
            .collect();
        if evaluated.is_empty() {
            skipped.push(vendor);
            continue;
        }
        let best = evaluated
            .iter()
            .filter(|l| l.best_vendor == Some(vendor))
            .count();
        let worst = evaluated
            .iter()
            .filter(|l| l.worst_vendor == Some(vendor))
            .count();
        let denominator = evaluated.len() as f64;
        let pct_best = 100.0 * best as f64 / denominator;
        let pct_worst = 100.0 * worst as f64 / denominator;
        rows.push(VendorPreference::from_percentages(
            vendor,
            evaluated.len(),
            pct_best,
            pct_worst,
        ));
    }
    Ok(VendorPreferenceReport { rows, skipped })
}
