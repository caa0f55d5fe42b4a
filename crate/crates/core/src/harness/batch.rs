use std::collections::BTreeMap;
use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{compute_metrics, MetricsReport};
use super::scenario::ScenarioSpec;
use super::trial::{run_trial, TrialResult};
use crate::error::{Error, Result};
use crate::planner::Variant;
use crate::rng::{derive_seed, label_hash};

pub const ARCHIVE_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub name: String,
    pub spec_hash: String,
    pub spec: ScenarioSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub scenario: String,
    pub variant: Variant,
    pub trial: usize,
    pub seed: u64,
    pub result: TrialResult,
}

/// Raw results of a batch: the scenarios as run plus one record per trial,
/// ordered by scenario, variant and trial index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchArchive {
    pub format: u32,
    pub base_seed: u64,
    pub n_trials: usize,
    pub scenarios: Vec<ScenarioEntry>,
    pub records: Vec<TrialRecord>,
}

impl BatchArchive {
    /// One report per (scenario, variant) in archive order.
    pub fn metrics(&self) -> Vec<MetricsReport> {
        let mut groups: Vec<((String, Variant), Vec<TrialResult>)> = Vec::new();
        for r in &self.records {
            let key = (r.scenario.clone(), r.variant);
            match groups.last_mut() {
                Some((k, v)) if *k == key => v.push(r.result.clone()),
                _ => groups.push((key, vec![r.result.clone()])),
            }
        }
        groups
            .iter()
            .map(|((s, v), rs)| compute_metrics(s, v.name(), rs))
            .collect()
    }

    pub fn results_for(&self, scenario: &str, variant: Variant) -> Vec<TrialResult> {
        self.records
            .iter()
            .filter(|r| r.scenario == scenario && r.variant == variant)
            .map(|r| r.result.clone())
            .collect()
    }
}

pub fn trial_seed(base_seed: u64, scenario: &str, variant: Variant, trial: usize) -> u64 {
    derive_seed(&[
        base_seed,
        label_hash(scenario),
        label_hash(variant.name()),
        trial as u64,
    ])
}

/// Runs every (scenario, variant, trial) combination, in parallel, with
/// results merged in a fixed order.
pub fn run_batch(
    scenarios: &[ScenarioSpec],
    variants: &[Variant],
    n_trials: usize,
    base_seed: u64,
) -> Result<BatchArchive> {
    if n_trials == 0 {
        return Err(Error::InvalidArgument("n_trials must be at least 1".into()));
    }
    let mut names = BTreeMap::new();
    for s in scenarios {
        s.validate()?;
        if names.insert(s.name.clone(), ()).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate scenario name {:?}", s.name)));
        }
    }
    let jobs: Vec<(&ScenarioSpec, Variant, usize)> = scenarios
        .iter()
        .flat_map(|s| variants.iter().flat_map(move |v| (0..n_trials).map(move |i| (s, *v, i))))
        .collect();
    let records = jobs
        .par_iter()
        .map(|(spec, variant, trial)| {
            let seed = trial_seed(base_seed, &spec.name, *variant, *trial);
            run_trial(spec, *variant, seed).map(|result| TrialRecord {
                scenario: spec.name.clone(),
                variant: *variant,
                trial: *trial,
                seed,
                result,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchArchive {
        format: ARCHIVE_FORMAT,
        base_seed,
        n_trials,
        scenarios: scenarios
            .iter()
            .map(|s| ScenarioEntry {
                name: s.name.clone(),
                spec_hash: s.hash(),
                spec: s.clone(),
            })
            .collect(),
        records,
    })
}

pub fn archive_to_json(archive: &BatchArchive) -> Result<String> {
    Ok(serde_json::to_string(archive)?)
}

pub fn archive_from_json(text: &str) -> Result<BatchArchive> {
    let archive: BatchArchive = serde_json::from_str(text)?;
    if archive.format != ARCHIVE_FORMAT {
        return Err(Error::Parse(format!("unsupported archive format {}", archive.format)));
    }
    for s in &archive.scenarios {
        if s.spec.hash() != s.spec_hash {
            return Err(Error::Parse(format!("spec hash mismatch for scenario {:?}", s.name)));
        }
    }
    Ok(archive)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.4}"))
}

/// CSV table, one row per report.
pub fn metrics_to_csv(reports: &[MetricsReport]) -> String {
    let mut s = String::from(
        "scenario,variant,success_rate,freezing_rate,norm_traj_len,fpr,collision_rate,timeout_rate,progress,trials\n",
    );
    for r in reports {
        writeln!(
            s,
            "{},{},{:.4},{:.4},{},{},{:.4},{:.4},{:.4},{}",
            r.scenario,
            r.variant,
            r.success_rate,
            r.freezing_rate,
            opt(r.norm_traj_len),
            opt(r.fpr),
            r.collision_rate,
            r.timeout_rate,
            r.progress,
            r.trials
        )
        .expect("write to string");
    }
    s
}
