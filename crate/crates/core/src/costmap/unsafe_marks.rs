use serde::{Deserialize, Serialize};

use super::grid::{CostMap, MAX_COST};
use crate::geometry::Point2;

/// Stamps `MAX_COST` on every cell whose center lies within `radius` of the
/// odom point. Returns whether the point itself falls inside the map.
pub fn mark_unsafe(map: &mut CostMap, location: Point2, radius: f64) -> bool {
    let g = map.geometry;
    let body = map.to_body(location);
    let reach = (radius / g.resolution).ceil() as i64 + 1;
    let (cx, cy) = g.cell_coords(body);
    for iy in cy - reach..=cy + reach {
        for ix in cx - reach..=cx + reach {
            if !g.in_grid(ix, iy) {
                continue;
            }
            let (ix, iy) = (ix as usize, iy as usize);
            if g.cell_center(ix, iy).distance(&body) <= radius + 1e-9 {
                map.set(ix, iy, MAX_COST);
            }
        }
    }
    g.in_grid(cx, cy)
}

/// Unsafe locations kept in the odom frame and re-stamped on every new map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnsafeRegistry {
    pub radius: f64,
    points: Vec<Point2>,
}

impl Default for UnsafeRegistry {
    fn default() -> Self {
        Self::new(0.3)
    }
}

impl UnsafeRegistry {
    pub fn new(radius: f64) -> Self {
        Self {
            radius,
            points: Vec::new(),
        }
    }

    /// Adds a location unless it is already recorded.
    pub fn add(&mut self, p: Point2) -> bool {
        if self.points.iter().any(|q| q.distance(&p) < 1e-9) {
            return false;
        }
        self.points.push(p);
        true
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Stamps every recorded location; returns how many fell outside the map.
    pub fn stamp(&self, map: &mut CostMap) -> usize {
        self.points
            .iter()
            .filter(|p| !mark_unsafe(map, **p, self.radius))
            .count()
    }
}
