use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded_rng;

pub type EmbeddingVector = Vec<f64>;

/// Weights of the shared branch `h = W2 · tanh(W1 · x + b1) + b2`.
///
/// Stored flat as `[W1 (hidden x input), b1, W2 (embed x hidden), b2]`, all
/// row-major, which is also the on-disk order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedderParams {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub embed_dim: usize,
    pub weights: Vec<f64>,
}

/// Per-branch activations kept for the backward pass.
pub(crate) struct Forward {
    pub hidden: Vec<f64>,
    pub out: Vec<f64>,
}

impl EmbedderParams {
    pub fn param_count(input_dim: usize, hidden_dim: usize, embed_dim: usize) -> usize {
        hidden_dim * input_dim + hidden_dim + embed_dim * hidden_dim + embed_dim
    }

    pub fn zeros(input_dim: usize, hidden_dim: usize, embed_dim: usize) -> Self {
        Self {
            input_dim,
            hidden_dim,
            embed_dim,
            weights: vec![0.0; Self::param_count(input_dim, hidden_dim, embed_dim)],
        }
    }

    /// Uniform `±1/sqrt(fan_in)` weights, zero biases.
    pub fn init(input_dim: usize, hidden_dim: usize, embed_dim: usize, seed: u64) -> Self {
        let mut p = Self::zeros(input_dim, hidden_dim, embed_dim);
        let mut rng = seeded_rng(seed);
        let a1 = 1.0 / (input_dim as f64).sqrt();
        let a2 = 1.0 / (hidden_dim as f64).sqrt();
        let (w1, _, w2, _) = p.offsets();
        for w in &mut p.weights[w1..w1 + hidden_dim * input_dim] {
            *w = rng.random_range(-a1..a1);
        }
        for w in &mut p.weights[w2..w2 + embed_dim * hidden_dim] {
            *w = rng.random_range(-a2..a2);
        }
        p
    }

    pub(crate) fn offsets(&self) -> (usize, usize, usize, usize) {
        let w1 = 0;
        let b1 = self.hidden_dim * self.input_dim;
        let w2 = b1 + self.hidden_dim;
        let b2 = w2 + self.embed_dim * self.hidden_dim;
        (w1, b1, w2, b2)
    }

    pub fn is_finite(&self) -> bool {
        self.weights.iter().all(|w| w.is_finite())
    }

    pub(crate) fn forward(&self, x: &[f64]) -> Forward {
        let (w1, b1, w2, b2) = self.offsets();
        let (d, h, e) = (self.input_dim, self.hidden_dim, self.embed_dim);
        let hidden: Vec<f64> = (0..h)
            .map(|j| {
                let row = &self.weights[w1 + j * d..w1 + (j + 1) * d];
                let a = row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>() + self.weights[b1 + j];
                a.tanh()
            })
            .collect();
        let out = (0..e)
            .map(|k| {
                let row = &self.weights[w2 + k * h..w2 + (k + 1) * h];
                row.iter().zip(&hidden).map(|(w, z)| w * z).sum::<f64>() + self.weights[b2 + k]
            })
            .collect();
        Forward { hidden, out }
    }

    /// Accumulates `d loss / d params` for one branch given `d loss / d out`.
    pub(crate) fn backward(&self, x: &[f64], fwd: &Forward, g_out: &[f64], grad: &mut [f64]) {
        let (w1, b1, w2, b2) = self.offsets();
        let (d, h, e) = (self.input_dim, self.hidden_dim, self.embed_dim);
        let mut g_hidden = vec![0.0; h];
        for k in 0..e {
            let g = g_out[k];
            if g == 0.0 {
                continue;
            }
            grad[b2 + k] += g;
            for j in 0..h {
                grad[w2 + k * h + j] += g * fwd.hidden[j];
                g_hidden[j] += g * self.weights[w2 + k * h + j];
            }
        }
        for j in 0..h {
            let ga = g_hidden[j] * (1.0 - fwd.hidden[j] * fwd.hidden[j]);
            if ga == 0.0 {
                continue;
            }
            grad[b1 + j] += ga;
            for i in 0..d {
                grad[w1 + j * d + i] += ga * x[i];
            }
        }
    }
}

pub fn embed(params: &EmbedderParams, x: &[f64]) -> Result<EmbeddingVector> {
    if x.len() != params.input_dim {
        return Err(Error::DimensionMismatch {
            expected: params.input_dim,
            actual: x.len(),
        });
    }
    Ok(params.forward(x).out)
}

/// Euclidean distance between two embeddings.
pub fn pair_distance(h1: &[f64], h2: &[f64]) -> Result<f64> {
    if h1.len() != h2.len() {
        return Err(Error::DimensionMismatch {
            expected: h1.len(),
            actual: h2.len(),
        });
    }
    Ok(h1
        .iter()
        .zip(h2)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_weights_give_zero_embedding() {
        let p = EmbedderParams::zeros(16, 16, 8);
        let h = embed(&p, &[0.7; 16]).unwrap();
        assert_eq!(h, vec![0.0; 8]);
    }

    #[test]
    fn identical_inputs_identical_embeddings() {
        let p = EmbedderParams::init(16, 16, 8, 9);
        let x: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(embed(&p, &x).unwrap(), embed(&p, &x.clone()).unwrap());
    }

    #[test]
    fn seeded_params_are_reproducible() {
        let a = EmbedderParams::init(16, 16, 8, 42);
        let b = EmbedderParams::init(16, 16, 8, 42);
        let x = vec![0.25; 16];
        let ha = embed(&a, &x).unwrap();
        let hb = embed(&b, &x).unwrap();
        let bits = |v: &[f64]| v.iter().map(|f| f.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&ha), bits(&hb));
        assert!(ha.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn dimension_mismatch() {
        let p = EmbedderParams::zeros(16, 16, 8);
        assert!(matches!(
            embed(&p, &[0.0; 15]),
            Err(Error::DimensionMismatch { expected: 16, actual: 15 })
        ));
        assert!(pair_distance(&[0.0; 3], &[0.0; 2]).is_err());
    }

    #[test]
    fn distance_basics() {
        assert_eq!(pair_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(pair_distance(&[4.0, 6.0], &[1.0, 2.0]).unwrap(), 5.0);
    }

    proptest! {
        #[test]
        fn distance_matches_naive_loop(
            a in prop::collection::vec(-10.0f64..10.0, 8),
            b in prop::collection::vec(-10.0f64..10.0, 8),
        ) {
            let mut acc = 0.0;
            for i in 0..a.len() {
                let d = a[i] - b[i];
                acc += d * d;
            }
            let d = pair_distance(&a, &b).unwrap();
            prop_assert!((d - acc.sqrt()).abs() <= 1e-12);
            prop_assert_eq!(d, pair_distance(&b, &a).unwrap());
        }
    }
}
