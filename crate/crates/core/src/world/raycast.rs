//! Planar lidar simulation: one horizontal scan per height, traced through
//! the world grid with Amanatides-Woo stepping.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::grid::WorldGrid;
use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, Pose2D};

/// One horizontal scan. Bearings are relative to the robot heading.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanLayer {
    pub z: f64,
    pub max_range: f64,
    pub bearings: Vec<f64>,
    pub ranges: Vec<f64>,
}

impl ScanLayer {
    pub fn hits(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.bearings
            .iter()
            .zip(&self.ranges)
            .filter(|(_, r)| **r < self.max_range)
            .map(|(b, r)| (*b, *r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Lidar {
    pub n_beams: usize,
    pub max_range: f64,
    /// Returns closer than this are dropped (the robot's own body).
    pub min_range: f64,
    /// Scan heights below, at and above the sensor mount.
    pub heights: [f64; 3],
}

impl Default for Lidar {
    fn default() -> Self {
        Self {
            n_beams: 360,
            max_range: 4.0,
            min_range: 0.4,
            heights: [0.2, 0.7, 1.2],
        }
    }
}

impl Lidar {
    pub fn validate(&self) -> Result<()> {
        if self.n_beams < 8 {
            return Err(Error::config("lidar needs at least 8 beams"));
        }
        if !(self.max_range > self.min_range) || self.min_range < 0.0 {
            return Err(Error::config("lidar ranges must satisfy 0 <= min < max"));
        }
        if self.heights.iter().any(|z| !(*z >= 0.0)) {
            return Err(Error::config("scan heights must be nonnegative"));
        }
        Ok(())
    }

    pub fn bearing(&self, k: usize) -> f64 {
        normalize_angle(2.0 * PI * k as f64 / self.n_beams as f64)
    }

    pub fn scan(&self, world: &WorldGrid, pose: &Pose2D, z: f64) -> Result<ScanLayer> {
        if !world.contains(pose.position()) {
            return Err(Error::OutOfBounds {
                x: pose.x,
                y: pose.y,
            });
        }
        if !(z >= 0.0) {
            return Err(Error::InvalidArgument(format!("scan height {z} < 0")));
        }
        if self.n_beams < 8 {
            return Err(Error::InvalidArgument("n_beams must be >= 8".into()));
        }
        let bearings: Vec<f64> = (0..self.n_beams).map(|k| self.bearing(k)).collect();
        let ranges = bearings
            .iter()
            .map(|b| self.trace(world, pose, pose.theta + b, z))
            .collect();
        Ok(ScanLayer {
            z,
            max_range: self.max_range,
            bearings,
            ranges,
        })
    }

    /// Distance at which the ray enters the first occluding cell, or
    /// `max_range`.
    fn trace(&self, world: &WorldGrid, pose: &Pose2D, heading: f64, z: f64) -> f64 {
        let res = world.resolution();
        let (dy, dx) = heading.sin_cos();
        let (mut ix, mut iy) = world.cell_coords(pose.position());

        let step_x: i64 = if dx > 0.0 { 1 } else { -1 };
        let step_y: i64 = if dy > 0.0 { 1 } else { -1 };
        let boundary = |i: i64, step: i64| (i + i64::from(step > 0)) as f64 * res;
        let mut t_max_x = if dx.abs() > 1e-15 {
            (boundary(ix, step_x) - pose.x) / dx
        } else {
            f64::INFINITY
        };
        let mut t_max_y = if dy.abs() > 1e-15 {
            (boundary(iy, step_y) - pose.y) / dy
        } else {
            f64::INFINITY
        };
        let t_delta_x = if dx.abs() > 1e-15 { res / dx.abs() } else { f64::INFINITY };
        let t_delta_y = if dy.abs() > 1e-15 { res / dy.abs() } else { f64::INFINITY };

        let mut t_entry = 0.0;
        while t_entry <= self.max_range {
            if !world.in_grid(ix, iy) {
                break;
            }
            if t_entry >= self.min_range && world.cell(ix as usize, iy as usize).occludes(z) {
                return t_entry;
            }
            if t_max_x < t_max_y {
                t_entry = t_max_x;
                t_max_x += t_delta_x;
                ix += step_x;
            } else {
                t_entry = t_max_y;
                t_max_y += t_delta_y;
                iy += step_y;
            }
        }
        self.max_range
    }
}

/// Single-height scan with no minimum range.
pub fn raycast_scan(
    world: &WorldGrid,
    pose: &Pose2D,
    z: f64,
    n_beams: usize,
    max_range: f64,
) -> Result<ScanLayer> {
    Lidar {
        n_beams,
        max_range,
        min_range: 0.0,
        ..Lidar::default()
    }
    .scan(world, pose, z)
}
