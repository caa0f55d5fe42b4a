//! Scenario files, closed-loop trials, metrics and batch runs.

mod batch;
mod metrics;
mod scenario;
mod trial;

pub use batch::{
    archive_from_json, archive_to_json, metrics_to_csv, run_batch, trial_seed, BatchArchive,
    ScenarioEntry, TrialRecord,
};
pub use metrics::{compute_metrics, pooled_fpr, MetricsReport};
pub use scenario::{bundled_scenario, ScenarioSpec, BUNDLED_SCENARIOS};
pub use trial::{
    run_trial, run_trial_with, CycleSnapshot, Outcome, PredictionCounts, RecoveryEvent,
    TrialOptions, TrialResult,
};
