//! `caseval` — batch evaluation of AI-generated clinical notes against
//! case-specific weighted rubrics.

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand};

use caseval_cli::manifest;
use caseval_cli::pipeline::{self, Mode, RunOptions};

#[derive(Parser)]
#[command(
    name = "caseval",
    version,
    about = "Rubric-based scoring, validation gating, and agreement analytics for AI-generated clinical notes"
)]
struct Cli {
    /// Dataset manifest (TOML). Relative paths inside it resolve against its
    /// directory.
    #[arg(long, global = true, default_value = "manifest.toml")]
    manifest: PathBuf,

    /// Scoring/generation worker threads. Output is identical for any count.
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed recorded in run metadata, reserved for sampling extensions.
    /// Current pipeline stages are fully deterministic and ignore it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Override the manifest's output directory.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Pin the run timestamp (RFC 3339) for byte-reproducible artifacts.
    #[arg(long, global = true)]
    timestamp: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gate clinician rubrics on their author's best/worst labels.
    Validate,
    /// Score every note against its case's validated rubrics.
    Score,
    /// Rank notes per rubric and compute inter-source agreement.
    Agree,
    /// Per-experiment score distributions and vendor preference.
    Summarize,
    /// Generate LLM rubrics through the configured completion port.
    GenRubrics,
    /// Clinician-effort versus token-spend cost ledger.
    Cost,
    /// validate, score, agree, summarize, and cost in sequence.
    Full,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = match cli.command {
        Command::Validate => Mode::Validate,
        Command::Score => Mode::Score,
        Command::Agree => Mode::Agree,
        Command::Summarize => Mode::Summarize,
        Command::GenRubrics => Mode::GenRubrics,
        Command::Cost => Mode::Cost,
        Command::Full => Mode::Full,
    };

    let timestamp: Option<DateTime<Utc>> = match &cli.timestamp {
        None => None,
        Some(raw) => match DateTime::parse_from_rfc3339(raw) {
            Ok(parsed) => Some(parsed.with_timezone(&Utc)),
            Err(error) => {
                eprintln!("error: --timestamp is not RFC 3339: {error}");
                return ExitCode::from(2);
            }
        },
    };

    let mut manifest = match manifest::load_manifest(&cli.manifest) {
        Ok(manifest) => manifest,
        Err(error) => {
            eprintln!("{error}");
            return ExitCode::from(error.exit_code() as u8);
        }
    };
    if let Some(output_dir) = cli.output_dir {
        manifest.output_dir = output_dir;
    }

    let options = RunOptions {
        workers: cli.workers,
        seed: cli.seed,
        timestamp,
    };
    match pipeline::run(&manifest, mode, &options) {
        Ok(summary) => {
            for line in &summary.lines {
                println!("{line}");
            }
            for warning in &summary.warnings {
                eprintln!("warning: {warning}");
            }
            println!("artifacts in {}", manifest.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(error) => {
            eprintln!("{error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
