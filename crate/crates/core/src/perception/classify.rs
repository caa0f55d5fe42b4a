use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::footprint::QuadrantFootprint;
use crate::error::{Error, Result};
use crate::fewshot::{
    min_class_distance, squash_distance, DescriptorGenerator, EmbedderParams, NUM_CLASSES,
};
use crate::rng::{seeded_rng, SimRng};
use crate::world::{VegClass, WorldGrid};

pub const DEFAULT_ALPHA: f64 = 2.0;

/// Rows are quadrants Q1..Q4, columns the trained classes
/// (sparse grass, dense grass, bush, tree). Entries lie in `[0, 1]`; smaller
/// means more similar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictionMatrix(pub [[f64; NUM_CLASSES]; 4]);

impl PredictionMatrix {
    pub fn new(rows: [[f64; NUM_CLASSES]; 4]) -> Result<Self> {
        if rows.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(
                "prediction entries must be finite and within [0, 1]".into(),
            ));
        }
        Ok(Self(rows))
    }

    pub fn rows(&self) -> &[[f64; NUM_CLASSES]; 4] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadrantClassification {
    /// Most similar trained class.
    pub class: VegClass,
    /// Row minimum.
    pub distance: f64,
    /// `exp(-alpha * distance)`, in `(0, 1]`.
    pub confidence: f64,
    pub pliable: bool,
}

/// Arg-min class, its distance and confidence for every row. Ties go to the
/// lowest class index.
pub fn summarize(matrix: &PredictionMatrix, alpha: f64) -> [QuadrantClassification; 4] {
    debug_assert!(alpha > 0.0);
    matrix.0.map(|row| {
        let mut best = 0;
        for j in 1..NUM_CLASSES {
            if row[j] < row[best] {
                best = j;
            }
        }
        let class = VegClass::from_class_index(best).expect("trained class index");
        QuadrantClassification {
            class,
            distance: row[best],
            confidence: (-alpha * row[best]).exp(),
            pliable: class.is_pliable(),
        }
    })
}

/// Simulated classifier output model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseModel {
    pub d_true: f64,
    pub d_false: f64,
    pub sigma: f64,
    /// Probability that a quadrant's true-class entry is swapped with a class
    /// of the opposite pliability.
    pub p_mis: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            d_true: 0.1,
            d_false: 0.8,
            sigma: 0.05,
            p_mis: 0.0,
        }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            sigma: 0.0,
            p_mis: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(self.d_true) || !in_unit(self.d_false) || !in_unit(self.p_mis) {
            return Err(Error::config("d_true, d_false and p_mis must lie in [0, 1]"));
        }
        if !(self.sigma >= 0.0) {
            return Err(Error::config("sigma must be nonnegative"));
        }
        Ok(())
    }
}

/// Majority class among the vegetated cells of a footprint, `Free` if none.
/// Count ties resolve to the earlier class in declaration order.
pub(crate) fn dominant_class(world: &WorldGrid, fp: &QuadrantFootprint) -> VegClass {
    let mut counts = [0usize; 6];
    for (ix, iy) in &fp.world_cells {
        let c = world.cell(*ix, *iy).class;
        let k = VegClass::ALL.iter().position(|v| *v == c).expect("known class");
        counts[k] += 1;
    }
    let mut best = VegClass::Free;
    let mut best_n = 0;
    for (k, class) in VegClass::ALL.iter().enumerate().skip(1) {
        if counts[k] > best_n {
            best = *class;
            best_n = counts[k];
        }
    }
    best
}

/// Noisy oracle row for a quadrant whose true dominant class is `truth`.
fn oracle_row(truth: VegClass, noise: &NoiseModel, rng: &mut SimRng) -> [f64; NUM_CLASSES] {
    let normal = (noise.sigma > 0.0).then(|| Normal::new(0.0, noise.sigma).expect("sigma > 0"));
    let true_idx = truth.class_index();
    let mut row = [0.0; NUM_CLASSES];
    for (j, v) in row.iter_mut().enumerate() {
        let base = if Some(j) == true_idx { noise.d_true } else { noise.d_false };
        let eps = normal.as_ref().map_or(0.0, |n| n.sample(rng));
        *v = (base + eps).clamp(0.0, 1.0);
    }
    // drawn unconditionally so the stream does not depend on the scene
    let u: f64 = rng.random();
    let pick: usize = rng.random_range(0..2);
    if let Some(t) = true_idx {
        if u < noise.p_mis {
            // the two classes of the opposite pliability group
            let opposite = if truth.is_pliable() { [2, 3] } else { [0, 1] };
            row.swap(t, opposite[pick]);
        }
    }
    row
}

/// Simulated classifier: true-class entries near `d_true`, others near
/// `d_false`. Quadrants showing only free ground or unknown obstacles are
/// dissimilar to every class. Returns the matrix and the ground-truth
/// dominant class per quadrant.
pub fn classify_oracle_with_rng(
    world: &WorldGrid,
    footprints: &[QuadrantFootprint; 4],
    noise: &NoiseModel,
    rng: &mut SimRng,
) -> (PredictionMatrix, [VegClass; 4]) {
    let truths = footprints.each_ref().map(|fp| dominant_class(world, fp));
    let rows = truths.map(|t| oracle_row(t, noise, rng));
    (PredictionMatrix(rows), truths)
}

pub fn classify_oracle(
    world: &WorldGrid,
    footprints: &[QuadrantFootprint; 4],
    noise: &NoiseModel,
    seed: u64,
) -> PredictionMatrix {
    classify_oracle_with_rng(world, footprints, noise, &mut seeded_rng(seed)).0
}

/// One prediction row from the trained embedder: squashed minimum distance to
/// each class's references.
pub fn classify_fewshot(
    params: &EmbedderParams,
    descriptor: &[f64],
    references: &[Vec<Vec<f64>>],
) -> Result<[f64; NUM_CLASSES]> {
    Ok(min_class_distance(params, descriptor, references)?.map(squash_distance))
}

/// Trained embedder plus the descriptor generator used to synthesize the
/// appearance of each quadrant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FewShotBackend {
    pub params: EmbedderParams,
    pub references: Vec<Vec<Vec<f64>>>,
    pub generator: DescriptorGenerator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum ClassifierBackend {
    Oracle(NoiseModel),
    FewShot(Box<FewShotBackend>),
}

impl Default for ClassifierBackend {
    fn default() -> Self {
        ClassifierBackend::Oracle(NoiseModel::default())
    }
}

impl ClassifierBackend {
    pub fn classify(
        &self,
        world: &WorldGrid,
        footprints: &[QuadrantFootprint; 4],
        rng: &mut SimRng,
    ) -> Result<(PredictionMatrix, [VegClass; 4])> {
        match self {
            ClassifierBackend::Oracle(noise) => {
                Ok(classify_oracle_with_rng(world, footprints, noise, rng))
            }
            ClassifierBackend::FewShot(fs) => {
                let truths = footprints.each_ref().map(|fp| dominant_class(world, fp));
                let mut rows = [[0.0; NUM_CLASSES]; 4];
                for (row, truth) in rows.iter_mut().zip(truths) {
                    let d = fs.generator.sample(truth, rng);
                    *row = classify_fewshot(&fs.params, &d.features, &fs.references)?;
                }
                Ok((PredictionMatrix(rows), truths))
            }
        }
    }
}
