//! Ground footprints of the four image quadrants.
//!
//! The forward field of view is a wedge split by bearing sign (image left /
//! right) and by range (near band -> bottom quadrants, far band -> top
//! quadrants). The wedge apex sits behind the body center, so the near band
//! is already wide where it meets the robot; only cells ahead of the body
//! center are kept. Bearings and ranges are measured from the apex and
//! follow image columns: positive to the right of the
//! optical axis, i.e. clockwise in the odom frame.

use serde::{Deserialize, Serialize};

use crate::costmap::MapGeometry;
use crate::geometry::{Point2, Pose2D};
use crate::world::WorldGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrant {
    /// top-left
    Q1,
    /// top-right
    Q2,
    /// bottom-left
    Q3,
    /// bottom-right
    Q4,
}

impl Quadrant {
    pub const ALL: [Quadrant; 4] = [Quadrant::Q1, Quadrant::Q2, Quadrant::Q3, Quadrant::Q4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn id(self) -> u8 {
        self as u8 + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CameraModel {
    pub fov_deg: f64,
    /// Near/far band boundary (m).
    pub r1: f64,
    /// Far band outer limit (m).
    pub r2: f64,
    /// Position of the wedge apex along the heading, relative to the body
    /// center (m, negative is behind).
    pub apex: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            fov_deg: 90.0,
            r1: 2.0,
            r2: 4.0,
            apex: -0.5,
        }
    }
}

impl CameraModel {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.fov_deg > 0.0 && self.fov_deg <= 360.0) {
            return Err(crate::Error::config("camera fov must be in (0, 360] degrees"));
        }
        if !(0.0 < self.r1 && self.r1 < self.r2) {
            return Err(crate::Error::config("camera bands must satisfy 0 < r1 < r2"));
        }
        if !(self.apex <= 0.0 && -self.apex < self.r1) {
            return Err(crate::Error::config("camera apex must lie behind the body, inside the near band"));
        }
        Ok(())
    }

    /// Quadrant of a ground point at the given image bearing (degrees,
    /// positive right) and range. Bearing 0 belongs to the right half.
    pub fn quadrant_of(&self, bearing_deg: f64, range: f64) -> Option<Quadrant> {
        if bearing_deg.abs() > self.fov_deg / 2.0 || !(range >= 0.0) || range >= self.r2 {
            return None;
        }
        let right = bearing_deg >= 0.0;
        Some(match (range < self.r1, right) {
            (false, false) => Quadrant::Q1,
            (false, true) => Quadrant::Q2,
            (true, false) => Quadrant::Q3,
            (true, true) => Quadrant::Q4,
        })
    }

    /// Quadrant of a point given in the robot body frame (x forward, y left).
    pub fn quadrant_of_body_point(&self, p: Point2) -> Option<Quadrant> {
        if p.x < 0.0 {
            return None;
        }
        let rel = Point2::new(p.x - self.apex, p.y);
        let bearing = (-rel.y.atan2(rel.x)).to_degrees();
        self.quadrant_of(bearing, rel.norm())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QuadrantFootprint {
    pub quadrant: Option<Quadrant>,
    /// World cells (ground truth) seen in this quadrant.
    pub world_cells: Vec<(usize, usize)>,
    /// Cost-map cells covered by this quadrant.
    pub map_cells: Vec<(usize, usize)>,
}

/// Projects the four quadrants onto the world grid and onto a robot-centered
/// cost map with the given geometry.
pub fn extract_footprints(
    world: &WorldGrid,
    pose: &Pose2D,
    camera: &CameraModel,
    map: &MapGeometry,
) -> [QuadrantFootprint; 4] {
    let mut out: [QuadrantFootprint; 4] = Default::default();
    for q in Quadrant::ALL {
        out[q.index()].quadrant = Some(q);
    }
    let to_body = pose.as_transform().inverse();

    let res = world.resolution();
    let reach = camera.r2 + res;
    let (x0, y0) = world.cell_coords(Point2::new(pose.x - reach, pose.y - reach));
    let (x1, y1) = world.cell_coords(Point2::new(pose.x + reach, pose.y + reach));
    for iy in y0..=y1 {
        for ix in x0..=x1 {
            if !world.in_grid(ix, iy) {
                continue;
            }
            let (ix, iy) = (ix as usize, iy as usize);
            let body = to_body.apply(world.cell_center(ix, iy));
            if let Some(q) = camera.quadrant_of_body_point(body) {
                out[q.index()].world_cells.push((ix, iy));
            }
        }
    }

    for iy in 0..map.size {
        for ix in 0..map.size {
            if let Some(q) = camera.quadrant_of_body_point(map.cell_center(ix, iy)) {
                out[q.index()].map_cells.push((ix, iy));
            }
        }
    }
    out
}
