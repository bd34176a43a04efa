//! Dataset ingestion, pipeline orchestration, reporting, and the scoring
//! wire formats behind the `caseval` binary.

pub mod dataset;
pub mod manifest;
pub mod pipeline;
pub mod report;
pub mod scorer;
