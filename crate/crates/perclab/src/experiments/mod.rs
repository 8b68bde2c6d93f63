//! Replica orchestration, deterministic seeding, statistical comparison,
//! file export, and the named verification checks.

mod checks;
mod compare;
mod config;
mod export;
mod runner;

pub use checks::{run_all_checks, run_check, CheckReport, CriterionResult, CHECK_NAMES};
pub use compare::{
    compare_to_reference_samples, compare_transform_grid, ComparisonReport, DistanceEntry,
    TransformGridPoint, TransformTarget, Verdict,
};
pub use config::{ExperimentConfig, OutputFormat, Params};
pub use export::{
    read_samples_csv, render_report_csv, render_samples_csv, write_report_csv, write_report_json,
    write_samples_csv,
};
pub use runner::{experiment_names, parallel_replicas, run_replicas};
