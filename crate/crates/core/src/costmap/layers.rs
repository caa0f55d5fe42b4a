use std::f64::consts::FRAC_PI_2;

use super::grid::{CostMap, MapGeometry};
use crate::error::{Error, Result};
use crate::geometry::{FrameTransform, Point2};
use crate::world::ScanLayer;

pub const OCCUPIED: f64 = 100.0;
/// Largest critical-sum value (occupied in all three layers).
pub const CRIT_MAX: f64 = 300.0;

/// Binary layer: the cell under each beam endpoint is 100, the rest 0.
pub fn build_layer(scan: &ScanLayer, geometry: MapGeometry, origin: FrameTransform) -> CostMap {
    let mut map = CostMap::new(geometry, origin);
    for (bearing, range) in scan.hits() {
        let p = Point2::new(range * bearing.cos(), range * bearing.sin());
        if let Some((ix, iy)) = geometry.cell_of(p) {
            map.set(ix, iy, OCCUPIED);
        }
    }
    map
}

/// Cellwise sum of the three height layers.
pub fn critical_sum(low: &CostMap, mid: &CostMap, high: &CostMap) -> Result<CostMap> {
    for other in [mid, high] {
        if other.geometry != low.geometry {
            return Err(Error::DimensionMismatch {
                expected: low.geometry.len(),
                actual: other.geometry.len(),
            });
        }
    }
    let data = low
        .values()
        .iter()
        .zip(mid.values())
        .zip(high.values())
        .map(|((a, b), c)| a + b + c)
        .collect();
    CostMap::from_parts(low.geometry, low.origin, data)
}

/// Mean critical value over the footprint cells scaled to `[0, pi/2]`.
/// An empty footprint has height 0.
pub fn height_measure(crit: &CostMap, cells: &[(usize, usize)]) -> f64 {
    if cells.is_empty() {
        return 0.0;
    }
    let sum: f64 = cells.iter().map(|(ix, iy)| crit.get(*ix, *iy)).sum();
    sum / cells.len() as f64 / CRIT_MAX * FRAC_PI_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan(hits: &[(f64, f64)]) -> ScanLayer {
        ScanLayer {
            z: 0.2,
            max_range: 4.0,
            bearings: hits.iter().map(|h| h.0).collect(),
            ranges: hits.iter().map(|h| h.1).collect(),
        }
    }

    #[test]
    fn no_hits_empty_layer() {
        let l = build_layer(&scan(&[(0.0, 4.0), (1.0, 4.0)]), MapGeometry::default(), FrameTransform::identity());
        assert_eq!(l.count_where(|v| v != 0.0), 0);
    }

    #[test]
    fn single_hit_ahead() {
        let l = build_layer(&scan(&[(0.0, 2.0)]), MapGeometry::default(), FrameTransform::identity());
        assert_eq!(l.get(60, 40), 100.0);
        assert_eq!(l.count_where(|v| v != 0.0), 1);
    }

    #[test]
    fn critical_sum_values() {
        let g = MapGeometry::new(5, 0.1).unwrap();
        let o = FrameTransform::identity();
        let mut low = CostMap::new(g, o);
        let mut mid = CostMap::new(g, o);
        let mut high = CostMap::new(g, o);
        low.set(1, 1, 100.0);
        mid.set(1, 1, 100.0);
        high.set(1, 1, 100.0);
        low.set(2, 2, 100.0);
        let c = critical_sum(&low, &mid, &high).unwrap();
        assert_eq!(c.get(1, 1), 300.0);
        assert_eq!(c.get(2, 2), 100.0);
        assert_eq!(c.get(0, 0), 0.0);
        let other = CostMap::new(MapGeometry::new(7, 0.1).unwrap(), o);
        assert!(critical_sum(&low, &mid, &other).is_err());
    }

    #[test]
    fn height_examples() {
        let g = MapGeometry::new(5, 0.1).unwrap();
        let mut c = CostMap::new(g, FrameTransform::identity());
        c.set(0, 0, 300.0);
        c.set(1, 0, 300.0);
        assert!((height_measure(&c, &[(0, 0), (1, 0)]) - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(height_measure(&c, &[(3, 3)]), 0.0);
        assert!((height_measure(&c, &[(0, 0), (3, 3)]) - FRAC_PI_2 / 2.0).abs() < 1e-15);
        assert_eq!(height_measure(&c, &[]), 0.0);
    }
}
