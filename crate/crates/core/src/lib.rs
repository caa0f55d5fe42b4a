//! Vegetation-aware navigation for legged robots in a deterministic 2D simulator.
//!
//! The crate is split along the processing pipeline:
//!
//! * [`world`] - ground-truth vegetation grid, robot dynamics with a drag/snag
//!   entrapment surrogate, and a three-height lidar raycaster.
//! * [`fewshot`] - a small siamese embedder trained with contrastive loss on
//!   synthetic quadrant descriptors.
//! * [`perception`] - camera quadrant footprints and per-quadrant
//!   classification (noisy oracle or few-shot backend).
//! * [`costmap`] - binary scan layers, critical-obstacle fusion, height
//!   measure and confidence-weighted cost clearing.
//! * [`planner`] - dynamic-window velocity search over the cleared map,
//!   cautious velocity stunting, adverse-phenomena detection and holonomic
//!   recovery.
//! * [`harness`] - scenario files, closed-loop trials, metrics and batch runs.

// Parameter checks are written as `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod costmap;
pub mod error;
pub mod fewshot;
pub mod geometry;
pub mod harness;
pub mod invariants;
pub mod perception;
pub mod planner;
pub mod rng;
pub mod world;

pub use error::{Error, Result};
pub use geometry::{normalize_angle, FrameTransform, Point2, Pose2D};
