use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::data::{Descriptor, LabeledPair};
use super::embedder::{embed, pair_distance, EmbedderParams};
use super::loss::{accumulate_gradient, pair_loss};
use super::NUM_CLASSES;
use crate::error::{Error, Result};
use crate::rng::seeded_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingParams {
    pub margin: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub hidden_dim: usize,
    pub embed_dim: usize,
}

impl Default for TrainingParams {
    fn default() -> Self {
        Self {
            margin: 1.0,
            learning_rate: 0.05,
            epochs: 20,
            batch_size: 32,
            seed: 0,
            hidden_dim: 16,
            embed_dim: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: EmbedderParams,
    /// Mean pair loss; entry 0 is before the first update, entry `k` after epoch `k`.
    pub loss_curve: Vec<f64>,
}

fn mean_loss(params: &EmbedderParams, pairs: &[LabeledPair], margin: f64) -> f64 {
    pairs.iter().map(|p| pair_loss(params, p, margin)).sum::<f64>() / pairs.len() as f64
}

/// Seeded mini-batch gradient descent on the contrastive loss.
///
/// Starts from `init` when given, otherwise from seeded uniform weights.
pub fn train(
    pairs: &[LabeledPair],
    params: &TrainingParams,
    init: Option<EmbedderParams>,
) -> Result<TrainOutcome> {
    if pairs.is_empty() {
        return Err(Error::EmptyDataset("no training pairs".into()));
    }
    if !pairs.iter().any(|p| p.label == 1) || !pairs.iter().any(|p| p.label == 0) {
        return Err(Error::EmptyDataset(
            "training pairs must contain both similar and dissimilar labels".into(),
        ));
    }
    if !(params.margin > 0.0) {
        return Err(Error::config("margin must be positive"));
    }
    if params.batch_size == 0 {
        return Err(Error::config("batch size must be positive"));
    }
    let dim = pairs[0].a.len();
    if let Some(bad) = pairs.iter().find(|p| p.a.len() != dim || p.b.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: bad.a.len().max(bad.b.len()),
        });
    }
    let mut model = match init {
        Some(p) if p.input_dim != dim => {
            return Err(Error::DimensionMismatch {
                expected: p.input_dim,
                actual: dim,
            })
        }
        Some(p) => p,
        None => EmbedderParams::init(dim, params.hidden_dim, params.embed_dim, params.seed),
    };

    let mut rng = seeded_rng(params.seed ^ 0x7EA1);
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    let mut curve = Vec::with_capacity(params.epochs + 1);
    curve.push(mean_loss(&model, pairs, params.margin));
    let mut grad = vec![0.0; model.weights.len()];

    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(params.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in batch {
                accumulate_gradient(&model, &pairs[i], params.margin, &mut grad);
            }
            let step = params.learning_rate / batch.len() as f64;
            for (w, g) in model.weights.iter_mut().zip(&grad) {
                *w -= step * g;
            }
        }
        curve.push(mean_loss(&model, pairs, params.margin));
    }
    Ok(TrainOutcome {
        params: model,
        loss_curve: curve,
    })
}

/// Maps a raw distance into `[0, 1)` via `d / (1 + d)`.
pub fn squash_distance(d: f64) -> f64 {
    d / (1.0 + d)
}

/// For each class, the smallest embedding distance from `query` to any of
/// that class's references. Raw (unsquashed) distances.
pub fn min_class_distance(
    params: &EmbedderParams,
    query: &[f64],
    references: &[Vec<Vec<f64>>],
) -> Result<[f64; NUM_CLASSES]> {
    if references.len() != NUM_CLASSES {
        return Err(Error::DimensionMismatch {
            expected: NUM_CLASSES,
            actual: references.len(),
        });
    }
    let hq = embed(params, query)?;
    let mut out = [0.0; NUM_CLASSES];
    for (j, refs) in references.iter().enumerate() {
        if refs.is_empty() {
            return Err(Error::EmptyReferenceClass(j));
        }
        let mut best = f64::INFINITY;
        for r in refs {
            best = best.min(pair_distance(&hq, &embed(params, r)?)?);
        }
        out[j] = best;
    }
    Ok(out)
}

/// Fraction of labeled queries whose nearest-reference class matches the label.
pub fn nearest_reference_accuracy(
    params: &EmbedderParams,
    queries: &[Descriptor],
    references: &[Vec<Vec<f64>>],
) -> Result<f64> {
    let mut correct = 0usize;
    let mut total = 0usize;
    for q in queries {
        let Some(label) = q.label else { continue };
        let d = min_class_distance(params, &q.features, references)?;
        let mut best = 0;
        for j in 1..NUM_CLASSES {
            if d[j] < d[best] {
                best = j;
            }
        }
        correct += usize::from(best == label);
        total += 1;
    }
    if total == 0 {
        return Err(Error::EmptyDataset("no labeled queries".into()));
    }
    Ok(correct as f64 / total as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fewshot::{make_pairs, DescriptorGenerator};

    #[test]
    fn empty_or_single_label_dataset_rejected() {
        assert!(matches!(train(&[], &TrainingParams::default(), None), Err(Error::EmptyDataset(_))));
        let only_similar = vec![LabeledPair { a: vec![0.0; 2], b: vec![1.0; 2], label: 1 }];
        assert!(train(&only_similar, &TrainingParams::default(), None).is_err());
    }

    #[test]
    fn zero_learning_rate_leaves_params_unchanged() {
        let g = DescriptorGenerator::new(16, 3.0, 1.0, 0);
        let pairs = make_pairs(&g.dataset(4, 20, 1), 2);
        let tp = TrainingParams {
            learning_rate: 0.0,
            epochs: 3,
            ..TrainingParams::default()
        };
        let init = EmbedderParams::init(16, 16, 8, 5);
        let out = train(&pairs, &tp, Some(init.clone())).unwrap();
        assert_eq!(out.params, init);
        assert_eq!(out.loss_curve.len(), 4);
    }

    #[test]
    fn training_reduces_loss() {
        let g = DescriptorGenerator::new(16, 3.0, 1.0, 0);
        let pairs = make_pairs(&g.dataset(4, 100, 1), 2);
        let out = train(&pairs, &TrainingParams { epochs: 5, ..TrainingParams::default() }, None).unwrap();
        assert!(out.loss_curve.last().unwrap() < &out.loss_curve[0]);
    }

    #[test]
    fn min_distance_cases() {
        let p = EmbedderParams::init(4, 6, 3, 2);
        let refs: Vec<Vec<Vec<f64>>> = (0..4)
            .map(|c| vec![vec![c as f64, 0.5, -0.2, 0.1 * c as f64]])
            .collect();
        let d = min_class_distance(&p, &refs[1][0], &refs).unwrap();
        assert_eq!(d[1], 0.0);
        // singleton references: direct distances
        let q = [0.3, 0.3, 0.3, 0.3];
        let hq = embed(&p, &q).unwrap();
        for j in 0..4 {
            let direct = pair_distance(&hq, &embed(&p, &refs[j][0]).unwrap()).unwrap();
            assert_eq!(d.len(), 4);
            assert_eq!(min_class_distance(&p, &q, &refs).unwrap()[j], direct);
        }
        let mut missing = refs.clone();
        missing[2].clear();
        assert!(matches!(
            min_class_distance(&p, &q, &missing),
            Err(Error::EmptyReferenceClass(2))
        ));
    }

    #[test]
    fn squash_range() {
        assert_eq!(squash_distance(0.0), 0.0);
        assert!((squash_distance(1.0) - 0.5).abs() < 1e-15);
        assert!(squash_distance(1e12) < 1.0);
    }
}
