use serde::{Deserialize, Serialize};

use super::data::{make_pairs, Dataset, DescriptorGenerator};
use super::train::{nearest_reference_accuracy, train, TrainOutcome, TrainingParams};
use crate::error::Result;
use crate::rng::{derive_seed, label_hash};

/// Synthetic data and training settings for an end-to-end run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub descriptor_dim: usize,
    /// Scale of the class centers.
    pub separation: f64,
    /// Per-feature noise around each center.
    pub noise: f64,
    pub test_fraction: f64,
    pub references_per_class: usize,
    pub seed: u64,
    pub training: TrainingParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            descriptor_dim: 16,
            separation: 3.0,
            noise: 1.0,
            test_fraction: 0.2,
            references_per_class: 5,
            seed: 0,
            training: TrainingParams::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub training: TrainOutcome,
    /// Nearest-reference accuracy on the held-out split.
    pub accuracy: f64,
    pub references: Vec<Vec<Vec<f64>>>,
    pub generator: DescriptorGenerator,
}

/// Generates `classes x per_class` descriptors, splits them, trains on
/// pairs from the training split and scores the held-out split.
pub fn run_pipeline(classes: usize, per_class: usize, cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    let seed = |tag: &str| derive_seed(&[cfg.seed, label_hash(tag)]);
    let generator = DescriptorGenerator::new(cfg.descriptor_dim, cfg.separation, cfg.noise, seed("generator"));
    let data = generator.dataset(classes, per_class, seed("dataset"));
    let split = Dataset::split(data, cfg.test_fraction, seed("split"));
    let pairs = make_pairs(&split.train, seed("pairs"));
    let training = train(&pairs, &cfg.training, None)?;
    let references = split.references(classes, cfg.references_per_class);
    let accuracy = nearest_reference_accuracy(&training.params, &split.test, &references)?;
    Ok(PipelineOutcome {
        training,
        accuracy,
        references,
        generator,
    })
}
