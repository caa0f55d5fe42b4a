use super::data::LabeledPair;
use super::embedder::EmbedderParams;
use crate::error::{Error, Result};

/// `label * d^2 + (1 - label) * max(margin - d, 0)^2`, with label 1 for a
/// similar pair.
pub fn contrastive_loss(d: f64, label: u8, margin: f64) -> Result<f64> {
    if !(d >= 0.0) {
        return Err(Error::InvalidArgument(format!("distance {d} must be >= 0")));
    }
    if !(margin > 0.0) {
        return Err(Error::InvalidArgument(format!("margin {margin} must be > 0")));
    }
    if label > 1 {
        return Err(Error::InvalidArgument(format!("pair label {label} not in {{0, 1}}")));
    }
    Ok(contrastive_loss_unchecked(d, label, margin))
}

pub fn contrastive_loss_unchecked(d: f64, label: u8, margin: f64) -> f64 {
    if label == 1 {
        d * d
    } else {
        let hinge = (margin - d).max(0.0);
        hinge * hinge
    }
}

/// Loss of one pair under `params`.
pub fn pair_loss(params: &EmbedderParams, pair: &LabeledPair, margin: f64) -> f64 {
    let h1 = params.forward(&pair.a).out;
    let h2 = params.forward(&pair.b).out;
    let d = h1
        .iter()
        .zip(&h2)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    contrastive_loss_unchecked(d, pair.label, margin)
}

/// Analytic gradient of the pair loss with respect to the flat weight vector.
///
/// Both branches share weights, so their contributions add. At `d = margin`
/// and at `d = 0` for dissimilar pairs the zero subgradient is used.
pub fn loss_gradient(params: &EmbedderParams, pair: &LabeledPair, margin: f64) -> Vec<f64> {
    let mut grad = vec![0.0; params.weights.len()];
    accumulate_gradient(params, pair, margin, &mut grad);
    grad
}

/// Adds the pair gradient into `grad` and returns the pair loss.
pub(crate) fn accumulate_gradient(
    params: &EmbedderParams,
    pair: &LabeledPair,
    margin: f64,
    grad: &mut [f64],
) -> f64 {
    let f1 = params.forward(&pair.a);
    let f2 = params.forward(&pair.b);
    let diff: Vec<f64> = f1.out.iter().zip(&f2.out).map(|(a, b)| a - b).collect();
    let d = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
    let loss = contrastive_loss_unchecked(d, pair.label, margin);

    // d loss / d h1; d loss / d h2 is its negation
    let g_h1: Vec<f64> = if pair.label == 1 {
        diff.iter().map(|v| 2.0 * v).collect()
    } else if d < margin && d > 0.0 {
        let s = -2.0 * (margin - d) / d;
        diff.iter().map(|v| s * v).collect()
    } else {
        return loss;
    };
    if g_h1.iter().all(|g| *g == 0.0) {
        return loss;
    }
    let g_h2: Vec<f64> = g_h1.iter().map(|g| -g).collect();
    params.backward(&pair.a, &f1, &g_h1, grad);
    params.backward(&pair.b, &f2, &g_h2, grad);
    loss
}
