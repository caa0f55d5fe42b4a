use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::costmap::{ClearingWeights, MapGeometry};
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Point2, Pose2D};
use crate::perception::{CameraModel, NoiseModel, DEFAULT_ALPHA};
use crate::planner::PlannerParams;
use crate::world::{build_world, DynamicsParams, Lidar, WorldGrid, WorldSpec};

fn default_duration() -> f64 {
    120.0
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_match_distance() -> f64 {
    0.5
}

/// Everything needed to run a trial. Stored as TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub name: String,
    /// Seed for the world layout (partial-density blobs).
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_duration")]
    pub duration: f64,
    pub start: Pose2D,
    pub goal: Point2,
    /// If set, the robot is snagged at the first step at or after this time
    /// during which it stands in dense grass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forced_snag_at: Option<f64>,
    /// Confidence exponent.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Quadrants whose best class distance exceeds this are treated as
    /// unrecognized obstacles rather than their nearest class.
    #[serde(default = "default_match_distance")]
    pub max_match_distance: f64,
    pub world: WorldSpec,
    #[serde(default)]
    pub camera: CameraModel,
    #[serde(default)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub lidar: Lidar,
    #[serde(default)]
    pub map: MapGeometry,
    #[serde(default)]
    pub clearing: ClearingWeights,
    #[serde(default)]
    pub planner: PlannerParams,
    #[serde(default)]
    pub dynamics: DynamicsParams,
}

impl ScenarioSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut spec: ScenarioSpec =
            toml::from_str(text).map_err(|e| Error::Parse(format!("scenario: {e}")))?;
        spec.start.theta = normalize_angle(spec.start.theta);
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("scenario: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::config("duration must be positive"));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::config("alpha must be positive"));
        }
        if !(self.max_match_distance > 0.0) {
            return Err(Error::config("max_match_distance must be positive"));
        }
        let (w, h) = (
            self.world.width as f64 * self.world.resolution,
            self.world.height as f64 * self.world.resolution,
        );
        let inside = |p: Point2| (0.0..w).contains(&p.x) && (0.0..h).contains(&p.y);
        if !inside(self.goal) {
            return Err(Error::config("goal lies outside the world"));
        }
        if !inside(self.start.position()) {
            return Err(Error::config("start lies outside the world"));
        }
        self.dynamics.validate()?;
        self.camera.validate()?;
        self.noise.validate()?;
        self.lidar.validate()?;
        self.map.validate()?;
        self.clearing.validate()?;
        self.planner.validate()?;
        Ok(())
    }

    pub fn build_world(&self) -> Result<WorldGrid> {
        build_world(&self.world, self.seed)
    }

    /// SHA-256 of the canonical JSON encoding, hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("scenario serializes");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn straight_line(&self) -> f64 {
        self.start.position().distance(&self.goal)
    }
}

/// Scenario files shipped with the crate.
pub const BUNDLED_SCENARIOS: [(&str, &str); 5] = [
    ("scenario1", include_str!("../../scenarios/scenario1.toml")),
    ("scenario2", include_str!("../../scenarios/scenario2.toml")),
    ("scenario3", include_str!("../../scenarios/scenario3.toml")),
    ("scenario4", include_str!("../../scenarios/scenario4.toml")),
    ("entrapment", include_str!("../../scenarios/entrapment.toml")),
];

pub fn bundled_scenario(name: &str) -> Result<ScenarioSpec> {
    let (_, text) = BUNDLED_SCENARIOS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no bundled scenario named {name:?}")))?;
    ScenarioSpec::from_toml(text)
}
