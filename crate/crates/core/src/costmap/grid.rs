use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FrameTransform, Point2, Pose2D};

/// Stand-in for an infinite cost.
pub const MAX_COST: f64 = f64::MAX;

/// Square robot-aligned grid. Cell `(ix, iy)` has its center at body-frame
/// `((ix - c) * res, (iy - c) * res)` with `c = size / 2`, so the robot sits
/// on the center cell and `+x` points along its heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MapGeometry {
    pub size: usize,
    pub resolution: f64,
}

impl Default for MapGeometry {
    fn default() -> Self {
        Self {
            size: 81,
            resolution: 0.1,
        }
    }
}

impl MapGeometry {
    pub fn new(size: usize, resolution: f64) -> Result<Self> {
        let g = Self { size, resolution };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.size == 0 || self.size.is_multiple_of(2) {
            return Err(Error::config("cost map size must be odd and positive"));
        }
        if !(self.resolution > 0.0) {
            return Err(Error::config("cost map resolution must be positive"));
        }
        Ok(())
    }

    pub fn center(&self) -> usize {
        self.size / 2
    }

    pub fn len(&self) -> usize {
        self.size * self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point2 {
        let c = self.center() as f64;
        Point2::new(
            (ix as f64 - c) * self.resolution,
            (iy as f64 - c) * self.resolution,
        )
    }

    /// Signed cell coordinates of a body-frame point (nearest center).
    pub fn cell_coords(&self, p: Point2) -> (i64, i64) {
        let c = self.center() as f64;
        (
            (p.x / self.resolution + c).round() as i64,
            (p.y / self.resolution + c).round() as i64,
        )
    }

    pub fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        let (ix, iy) = self.cell_coords(p);
        self.in_grid(ix, iy).then_some((ix as usize, iy as usize))
    }

    pub fn in_grid(&self, ix: i64, iy: i64) -> bool {
        let n = self.size as i64;
        (0..n).contains(&ix) && (0..n).contains(&iy)
    }

    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.size + ix
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostMap {
    pub geometry: MapGeometry,
    /// Body frame to odom frame, i.e. the robot pose when the map was built.
    pub origin: FrameTransform,
    data: Vec<f64>,
}

impl CostMap {
    pub fn new(geometry: MapGeometry, origin: FrameTransform) -> Self {
        Self {
            geometry,
            origin,
            data: vec![0.0; geometry.len()],
        }
    }

    pub fn centered_on(geometry: MapGeometry, pose: &Pose2D) -> Self {
        Self::new(geometry, pose.as_transform())
    }

    pub(crate) fn from_parts(
        geometry: MapGeometry,
        origin: FrameTransform,
        data: Vec<f64>,
    ) -> Result<Self> {
        if data.len() != geometry.len() {
            return Err(Error::DimensionMismatch {
                expected: geometry.len(),
                actual: data.len(),
            });
        }
        Ok(Self {
            geometry,
            origin,
            data,
        })
    }

    pub fn size(&self) -> usize {
        self.geometry.size
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.data[self.geometry.index(ix, iy)]
    }

    pub fn set(&mut self, ix: usize, iy: usize, v: f64) {
        let i = self.geometry.index(ix, iy);
        self.data[i] = v;
    }

    pub fn same_frame(&self, other: &CostMap) -> bool {
        self.geometry == other.geometry && self.origin == other.origin
    }

    pub fn to_body(&self, odom: Point2) -> Point2 {
        self.origin.inverse().apply(odom)
    }

    pub fn to_odom(&self, body: Point2) -> Point2 {
        self.origin.apply(body)
    }

    /// Cell containing an odom-frame point, if inside the map.
    pub fn cell_of_odom(&self, odom: Point2) -> Option<(usize, usize)> {
        self.geometry.cell_of(self.to_body(odom))
    }

    pub fn count_where(&self, pred: impl Fn(f64) -> bool) -> usize {
        self.data.iter().filter(|v| pred(**v)).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn center_cell_is_robot() {
        let g = MapGeometry::default();
        assert_eq!(g.center(), 40);
        assert_eq!(g.cell_center(40, 40), Point2::new(0.0, 0.0));
        assert_eq!(g.cell_of(Point2::new(2.0, 0.0)), Some((60, 40)));
        assert_eq!(g.cell_of(Point2::new(0.0, -4.0)), Some((40, 0)));
        assert_eq!(g.cell_of(Point2::new(4.1, 0.0)), None);
    }

    #[test]
    fn odom_lookup_follows_pose() {
        let m = CostMap::centered_on(MapGeometry::default(), &Pose2D::new(3.0, 1.0, std::f64::consts::FRAC_PI_2));
        // one meter ahead of a robot facing +y
        assert_eq!(m.cell_of_odom(Point2::new(3.0, 2.0)), Some((50, 40)));
    }

    #[test]
    fn even_size_rejected() {
        assert!(MapGeometry::new(80, 0.1).is_err());
        assert!(MapGeometry::new(81, 0.0).is_err());
    }
}
