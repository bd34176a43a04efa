//! Streaming dataset ingestion and record persistence.
//!
//! Cases, notes, and scores are line-delimited JSON; each rubric is a single
//! JSON document. Everything loaded passes core validation, cross-references
//! resolve, and the per-(case, labeler) label invariant holds before the
//! loader returns.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use caseval_core::model::{
    validate_case, validate_note, validate_rubric_structure, Case, CaseRecord, LabelKind,
    ModelError, NoteOutput, NoteRecord, Rubric, RubricRecord, ScoreRecord,
};

use crate::manifest::Manifest;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file} line {line}: {detail}")]
    Parse {
        file: PathBuf,
        line: usize,
        detail: String,
    },
    #[error("{file}: {source}")]
    Model {
        file: PathBuf,
        #[source]
        source: ModelError,
    },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("{kind} `{id}` references unknown case `{missing}`")]
    DanglingReference {
        kind: &'static str,
        id: String,
        missing: String,
    },
    #[error("note `{note_id}` references experiment `{experiment_id}` absent from the manifest")]
    UnknownExperiment {
        note_id: String,
        experiment_id: String,
    },
    #[error("labeler `{labeler_id}` has more than one `{kind}` note for case `{case_id}`")]
    DuplicateLabel {
        case_id: String,
        labeler_id: String,
        kind: LabelKind,
    },
}

/// Fully validated, cross-checked input records keyed by id.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub cases: BTreeMap<String, Case>,
    pub rubrics: BTreeMap<String, Rubric>,
    pub notes: BTreeMap<String, NoteOutput>,
}

impl Dataset {
    pub fn case_rubrics<'a>(&'a self, case_id: &'a str) -> impl Iterator<Item = &'a Rubric> {
        self.rubrics.values().filter(move |r| r.case_id == case_id)
    }

    pub fn case_notes<'a>(&'a self, case_id: &'a str) -> impl Iterator<Item = &'a NoteOutput> {
        self.notes.values().filter(move |n| n.case_id == case_id)
    }
}

fn read_jsonl<T, F, O>(path: &Path, mut promote: F) -> Result<Vec<O>, IngestError>
where
    T: serde::de::DeserializeOwned,
    F: FnMut(T, usize) -> Result<O, IngestError>,
{
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line_no = index + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: T = serde_json::from_str(&line).map_err(|e| IngestError::Parse {
            file: path.to_path_buf(),
            line: line_no,
            detail: e.to_string(),
        })?;
        out.push(promote(record, line_no)?);
    }
    Ok(out)
}

/// Load and validate the full dataset named by a manifest.
pub fn load_dataset(manifest: &Manifest) -> Result<Dataset, IngestError> {
    let mut dataset = Dataset::default();

    let cases_path = manifest.cases_path.clone();
    let cases = read_jsonl::<CaseRecord, _, _>(&cases_path, |record, line| {
        validate_case(record).map_err(|e| IngestError::Parse {
            file: cases_path.clone(),
            line,
            detail: e.to_string(),
        })
    })?;
    for case in cases {
        if dataset
            .cases
            .insert(case.case_id.clone(), case.clone())
            .is_some()
        {
            return Err(IngestError::DuplicateId {
                kind: "case",
                id: case.case_id,
            });
        }
    }

    let mut rubric_paths: Vec<PathBuf> = std::fs::read_dir(&manifest.rubrics_path)
        .map_err(|source| IngestError::Io {
            path: manifest.rubrics_path.clone(),
            source,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    rubric_paths.sort();
    for path in rubric_paths {
        let text = std::fs::read_to_string(&path).map_err(|source| IngestError::Io {
            path: path.clone(),
            source,
        })?;
        let record: RubricRecord = serde_json::from_str(&text).map_err(|e| IngestError::Parse {
            file: path.clone(),
            line: 1,
            detail: e.to_string(),
        })?;
        let rubric = validate_rubric_structure(record).map_err(|source| IngestError::Model {
            file: path.clone(),
            source,
        })?;
        if !dataset.cases.contains_key(&rubric.case_id) {
            return Err(IngestError::DanglingReference {
                kind: "rubric",
                id: rubric.rubric_id,
                missing: rubric.case_id,
            });
        }
        if dataset
            .rubrics
            .insert(rubric.rubric_id.clone(), rubric.clone())
            .is_some()
        {
            return Err(IngestError::DuplicateId {
                kind: "rubric",
                id: rubric.rubric_id,
            });
        }
    }

    let notes_path = manifest.notes_path.clone();
    let notes = read_jsonl::<NoteRecord, _, _>(&notes_path, |record, line| {
        validate_note(record).map_err(|e| IngestError::Parse {
            file: notes_path.clone(),
            line,
            detail: e.to_string(),
        })
    })?;
    let mut label_seen: BTreeMap<(String, String, LabelKind), String> = BTreeMap::new();
    for note in notes {
        if !dataset.cases.contains_key(&note.case_id) {
            return Err(IngestError::DanglingReference {
                kind: "note",
                id: note.note_id,
                missing: note.case_id,
            });
        }
        if !manifest.experiments.contains(&note.experiment_id) {
            return Err(IngestError::UnknownExperiment {
                note_id: note.note_id,
                experiment_id: note.experiment_id,
            });
        }
        if let Some(label) = &note.label {
            let key = (note.case_id.clone(), label.labeler_id.clone(), label.kind);
            if label_seen.insert(key, note.note_id.clone()).is_some() {
                return Err(IngestError::DuplicateLabel {
                    case_id: note.case_id,
                    labeler_id: label.labeler_id.clone(),
                    kind: label.kind,
                });
            }
        }
        if dataset
            .notes
            .insert(note.note_id.clone(), note.clone())
            .is_some()
        {
            return Err(IngestError::DuplicateId {
                kind: "note",
                id: note.note_id,
            });
        }
    }

    Ok(dataset)
}

/// Load previously persisted score records, if the store exists.
pub fn load_scores(path: &Path) -> Result<Vec<ScoreRecord>, IngestError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    read_jsonl::<ScoreRecord, _, _>(path, |record, _| Ok(record))
}

/// Append records to a line-delimited JSON file, creating it if needed.
pub fn append_jsonl<T: Serialize>(path: &Path, records: &[T]) -> std::io::Result<()> {
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    let mut buffer = String::new();
    for record in records {
        buffer.push_str(&serde_json::to_string(record).expect("serializable record"));
        buffer.push('\n');
    }
    file.write_all(buffer.as_bytes())
}

/// Overwrite a line-delimited JSON file.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> std::io::Result<()> {
    let mut buffer = String::new();
    for record in records {
        buffer.push_str(&serde_json::to_string(record).expect("serializable record"));
        buffer.push('\n');
    }
    std::fs::write(path, buffer)
}

/// Write one rubric as a pretty-printed standalone document.
pub fn write_rubric_doc(dir: &Path, rubric: &Rubric) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(rubric).expect("serializable rubric");
    text.push('\n');
    std::fs::write(dir.join(format!("{}.json", rubric.rubric_id)), text)
}
