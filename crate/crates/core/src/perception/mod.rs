//! Camera quadrants and per-quadrant vegetation classification.

mod classify;
mod footprint;

pub use classify::{
    classify_fewshot, classify_oracle, classify_oracle_with_rng, summarize, ClassifierBackend,
    FewShotBackend, NoiseModel, PredictionMatrix, QuadrantClassification, DEFAULT_ALPHA,
};
pub use footprint::{extract_footprints, CameraModel, Quadrant, QuadrantFootprint};
