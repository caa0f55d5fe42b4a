use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::grid::{CostMap, MAX_COST};
use crate::error::{Error, Result};
use crate::perception::QuadrantClassification;
use crate::world::VegClass;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClearingWeights {
    pub w_s: f64,
    pub w_d: f64,
    pub w_npv: f64,
    pub b_npv: f64,
}

impl Default for ClearingWeights {
    fn default() -> Self {
        Self {
            w_s: 1.0,
            w_d: 2.0,
            w_npv: 1.0,
            b_npv: 4.0,
        }
    }
}

impl ClearingWeights {
    pub fn new(w_s: f64, w_d: f64, w_npv: f64, b_npv: f64) -> Result<Self> {
        let w = Self {
            w_s,
            w_d,
            w_npv,
            b_npv,
        };
        w.validate()?;
        Ok(w)
    }

    /// Positivity, `w_d > w_s` and `b_npv > w_d + 1`.
    pub fn validate(&self) -> Result<()> {
        let all = [self.w_s, self.w_d, self.w_npv, self.b_npv];
        if all.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::config("clearing weights must be positive and finite"));
        }
        if !(self.w_d > self.w_s) {
            return Err(Error::config("clearing weights need w_d > w_s"));
        }
        if !(self.b_npv > self.w_d + 1.0) {
            return Err(Error::config("clearing weights need b_npv > w_d + 1"));
        }
        Ok(())
    }

    /// Largest attainable clear value: NPV with confidence 1 at full height.
    pub fn normalizer(&self) -> f64 {
        self.w_npv + self.b_npv + 1.0
    }
}

/// Clearing factor for one quadrant. Pliable classes shrink with confidence
/// and grow with height; non-pliable ones start at `b_npv`.
pub fn clear_value(class: &QuadrantClassification, h: f64, w: &ClearingWeights) -> f64 {
    let kappa = class.confidence;
    match class.class {
        VegClass::SparseGrass => w.w_s * (1.0 - kappa) + 2.0 * h / PI,
        VegClass::DenseGrass => w.w_d * (1.0 - kappa) + 2.0 * h / PI,
        _ => w.w_npv * kappa + w.b_npv + h.sin(),
    }
}

/// Per-quadrant inputs to [`apply_clearing`].
#[derive(Debug, Clone, Copy)]
pub struct QuadrantEvidence<'a> {
    pub cells: &'a [(usize, usize)],
    pub classification: QuadrantClassification,
    /// Height measure in `[0, pi/2]`.
    pub height: f64,
}

/// Scales the low layer inside each quadrant by its normalized clear value.
/// Cells outside every quadrant keep their low-layer value and `MAX_COST`
/// cells stay as they are.
pub fn apply_clearing(
    low: &CostMap,
    quadrants: &[QuadrantEvidence<'_>],
    w: &ClearingWeights,
) -> CostMap {
    let mut out = low.clone();
    let norm = w.normalizer();
    for q in quadrants {
        debug_assert!((0.0..=FRAC_PI_2 + 1e-12).contains(&q.height));
        let factor = clear_value(&q.classification, q.height, w) / norm;
        for &(ix, iy) in q.cells {
            let c = low.get(ix, iy);
            if c != MAX_COST {
                out.set(ix, iy, c * factor);
            }
        }
    }
    out
}

/// Cost above which a cell blocks a trajectory: the smallest normalized
/// non-pliable cost of an occupied cell, which every pliable cost stays below.
pub fn admissibility_threshold(w: &ClearingWeights) -> f64 {
    w.b_npv / w.normalizer() * 100.0
}

pub fn is_inadmissible(cost: f64, threshold: f64) -> bool {
    cost == MAX_COST || cost > threshold
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costmap::MapGeometry;
    use crate::geometry::FrameTransform;

    fn qc(class: VegClass, confidence: f64) -> QuadrantClassification {
        QuadrantClassification {
            class,
            distance: -confidence.ln() / 2.0,
            confidence,
            pliable: class.is_pliable(),
        }
    }

    #[test]
    fn clear_value_examples() {
        let w = ClearingWeights::default();
        assert_eq!(clear_value(&qc(VegClass::SparseGrass, 1.0), 0.0, &w), 0.0);
        let pv_max = clear_value(&qc(VegClass::DenseGrass, 1e-300), FRAC_PI_2, &w);
        assert!((pv_max - 3.0).abs() < 1e-12);
        let npv_min = clear_value(&qc(VegClass::Bush, 1e-300), 0.0, &w);
        assert!((npv_min - 4.0).abs() < 1e-12);
    }

    #[test]
    fn weight_constraints() {
        assert!(ClearingWeights::new(1.0, 2.0, 1.0, 4.0).is_ok());
        assert!(ClearingWeights::new(2.0, 2.0, 1.0, 4.0).is_err());
        assert!(ClearingWeights::new(1.0, 2.0, 1.0, 3.0).is_err());
        assert!(ClearingWeights::new(-1.0, 2.0, 1.0, 4.0).is_err());
    }

    #[test]
    fn clearing_examples() {
        let w = ClearingWeights::default();
        let g = MapGeometry::new(5, 0.1).unwrap();
        let mut low = CostMap::new(g, FrameTransform::identity());
        for ix in 0..5 {
            low.set(ix, 0, 100.0);
        }
        low.set(4, 4, MAX_COST);
        let a = [(0, 0)];
        let b = [(1, 0)];
        let c = [(2, 0), (3, 3), (4, 4)];
        let quads = [
            QuadrantEvidence { cells: &a, classification: qc(VegClass::SparseGrass, 1.0), height: 0.0 },
            QuadrantEvidence { cells: &b, classification: qc(VegClass::Tree, 1.0), height: FRAC_PI_2 },
            QuadrantEvidence { cells: &c, classification: qc(VegClass::DenseGrass, 0.5), height: FRAC_PI_2 / 2.0 },
        ];
        let out = apply_clearing(&low, &quads, &w);
        assert_eq!(out.get(0, 0), 0.0);
        assert!((out.get(1, 0) - 100.0).abs() < 1e-12);
        assert!((out.get(2, 0) - 25.0).abs() < 1e-12);
        assert_eq!(out.get(3, 3), 0.0);
        assert_eq!(out.get(4, 4), MAX_COST);
        // outside every quadrant
        assert_eq!(out.get(3, 0), 100.0);
    }

    #[test]
    fn threshold_between_pv_and_npv() {
        let w = ClearingWeights::default();
        let t = admissibility_threshold(&w);
        assert!((t - 200.0 / 3.0).abs() < 1e-12);
        assert!(!is_inadmissible(25.0, t));
        assert!(is_inadmissible(100.0, t));
        assert!(is_inadmissible(MAX_COST, t));
        assert!(!is_inadmissible(0.0, t));
    }
}
