use serde::{Deserialize, Serialize};

use super::trial::{Outcome, PredictionCounts, TrialResult};

/// Aggregate over the trials of one (scenario, variant) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scenario: String,
    pub variant: String,
    pub trials: usize,
    pub success_rate: f64,
    /// Planner freezes, entrapments and failed recoveries.
    pub freezing_rate: f64,
    pub collision_rate: f64,
    pub timeout_rate: f64,
    /// Mean path length over the straight-line distance to the goal region,
    /// successes only.
    pub norm_traj_len: Option<f64>,
    /// Mean over trials of false positives over non-pliable quadrants.
    pub fpr: Option<f64>,
    /// Mean fraction of the start-goal distance covered, all trials.
    pub progress: f64,
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

pub fn compute_metrics(scenario: &str, variant: &str, results: &[TrialResult]) -> MetricsReport {
    assert!(!results.is_empty(), "metrics need at least one trial");
    let n = results.len() as f64;
    let rate = |pred: fn(Outcome) -> bool| results.iter().filter(|r| pred(r.outcome)).count() as f64 / n;
    MetricsReport {
        scenario: scenario.to_string(),
        variant: variant.to_string(),
        trials: results.len(),
        success_rate: rate(|o| o == Outcome::Success),
        freezing_rate: rate(|o| matches!(o, Outcome::Frozen | Outcome::RecoveryFailure)),
        collision_rate: rate(|o| o == Outcome::Collision),
        timeout_rate: rate(|o| o == Outcome::Timeout),
        norm_traj_len: mean(
            results
                .iter()
                .filter(|r| r.outcome == Outcome::Success && r.reach_distance > 0.0)
                .map(|r| r.path_length / r.reach_distance),
        ),
        fpr: mean(results.iter().filter_map(|r| r.predictions.fpr())),
        progress: mean(results.iter().map(TrialResult::progress)).unwrap_or(0.0),
    }
}

/// False-positive rate over all quadrant predictions of all trials pooled.
pub fn pooled_fpr(results: &[TrialResult]) -> Option<f64> {
    let mut total = PredictionCounts::default();
    for r in results {
        total.add(&r.predictions);
    }
    total.fpr()
}
