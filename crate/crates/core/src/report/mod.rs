//! Command orchestration and output artifacts.

pub mod config;
pub mod run;
pub mod table;

pub use config::{CommandKind, ExperimentConfig, RunArgs};
pub use run::{execute, manifest_path, run, RunManifest, RunOutput};
pub use table::{fmt_real, parse_csv, parse_jsonl, render_table, Format, Record, RecordKind};
