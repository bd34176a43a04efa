//! Core engine for case-specific rubric evaluation of AI-generated clinical notes.
//!
//! The engine scores candidate notes against per-case rubrics (weighted
//! natural-language criteria), gates clinician rubrics on a best/worst
//! separation test, measures run-to-run scoring stability, and compares
//! rubric sources through rank-agreement statistics (tie-corrected Kendall
//! tau). A cost ledger tracks clinician effort and LLM token spend side by
//! side.
//!
//! Modules map onto the pipeline stages:
//!
//! * [`model`] — domain types and their validation rules
//! * [`scoring`] — the scoring-agent port, normalized scores, stability
//! * [`gate`] — the best/worst acceptance test for clinician rubrics
//! * [`generation`] — prompt assembly and parsing for LLM-generated rubrics
//! * [`agreement`] — rankings, Kendall tau-b, convergence diagnostics
//! * [`aggregate`] — per-experiment score summaries and vendor preference
//! * [`cost`] — clinician-hour and token-spend accounting
//! * [`stats`] — the shared quantile/stddev conventions used by reports

pub mod aggregate;
pub mod agreement;
pub mod cost;
pub mod gate;
pub mod generation;
pub mod model;
pub mod scoring;
pub mod stats;
