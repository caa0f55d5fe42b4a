use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::rng::{derive_seed, label_hash, seeded_rng, SimRng};
use crate::world::VegClass;

/// Appearance features of one image quadrant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub features: Vec<f64>,
    /// Trained class index (0..4) when known.
    pub label: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// 1 for a same-class pair, 0 otherwise.
    pub label: u8,
}

/// Gaussian class clusters in descriptor space.
///
/// Every world class gets a center, including `Free` and `Unknown` which the
/// embedder never trains on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorGenerator {
    pub dim: usize,
    pub separation: f64,
    pub noise: f64,
    centers: Vec<Vec<f64>>,
}

impl DescriptorGenerator {
    pub fn new(dim: usize, separation: f64, noise: f64, seed: u64) -> Self {
        let mut rng = seeded_rng(derive_seed(&[seed, label_hash("descriptor-centers")]));
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let centers = VegClass::ALL
            .iter()
            .map(|_| (0..dim).map(|_| separation * normal.sample(&mut rng)).collect())
            .collect();
        Self {
            dim,
            separation,
            noise,
            centers,
        }
    }

    pub fn center(&self, class: VegClass) -> &[f64] {
        let idx = VegClass::ALL.iter().position(|c| *c == class).unwrap_or(0);
        &self.centers[idx]
    }

    pub fn sample(&self, class: VegClass, rng: &mut SimRng) -> Descriptor {
        let center = self.center(class);
        let features = if self.noise > 0.0 {
            let normal = Normal::new(0.0, self.noise).expect("positive noise");
            center.iter().map(|c| c + normal.sample(rng)).collect()
        } else {
            center.to_vec()
        };
        Descriptor {
            features,
            label: class.class_index(),
        }
    }

    /// `per_class` descriptors for each of the first `classes` trained classes.
    pub fn dataset(&self, classes: usize, per_class: usize, seed: u64) -> Vec<Descriptor> {
        let mut rng = seeded_rng(seed);
        let mut out = Vec::with_capacity(classes * per_class);
        for class in VegClass::TRAINED.iter().take(classes) {
            for _ in 0..per_class {
                out.push(self.sample(*class, &mut rng));
            }
        }
        out
    }
}

/// Stratified train / held-out split of labeled descriptors.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub train: Vec<Descriptor>,
    pub test: Vec<Descriptor>,
}

impl Dataset {
    pub fn split(descriptors: Vec<Descriptor>, test_fraction: f64, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let mut by_class: Vec<Vec<Descriptor>> = Vec::new();
        for d in descriptors {
            let label = d.label.unwrap_or(0);
            if by_class.len() <= label {
                by_class.resize_with(label + 1, Vec::new);
            }
            by_class[label].push(d);
        }
        let (mut train, mut test) = (Vec::new(), Vec::new());
        for mut group in by_class {
            group.shuffle(&mut rng);
            let n_test = (group.len() as f64 * test_fraction).round() as usize;
            test.extend(group.drain(..n_test));
            train.extend(group);
        }
        Self { train, test }
    }

    /// First `k` training descriptors of each class.
    pub fn references(&self, classes: usize, k: usize) -> Vec<Vec<Vec<f64>>> {
        (0..classes)
            .map(|c| {
                self.train
                    .iter()
                    .filter(|d| d.label == Some(c))
                    .take(k)
                    .map(|d| d.features.clone())
                    .collect()
            })
            .collect()
    }
}

/// One similar and one dissimilar partner per descriptor.
pub fn make_pairs(descriptors: &[Descriptor], seed: u64) -> Vec<LabeledPair> {
    let mut rng = seeded_rng(seed);
    let n_classes = descriptors.iter().filter_map(|d| d.label).max().map_or(0, |m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, d) in descriptors.iter().enumerate() {
        if let Some(l) = d.label {
            by_class[l].push(i);
        }
    }
    let mut pairs = Vec::with_capacity(descriptors.len() * 2);
    for d in descriptors {
        let Some(l) = d.label else { continue };
        let same = &by_class[l];
        let j = same[rng.random_range(0..same.len())];
        pairs.push(LabeledPair {
            a: d.features.clone(),
            b: descriptors[j].features.clone(),
            label: 1,
        });
        if n_classes > 1 {
            let mut other = rng.random_range(0..n_classes - 1);
            if other >= l {
                other += 1;
            }
            let pool = &by_class[other];
            if pool.is_empty() {
                continue;
            }
            let j = pool[rng.random_range(0..pool.len())];
            pairs.push(LabeledPair {
                a: d.features.clone(),
                b: descriptors[j].features.clone(),
                label: 0,
            });
        }
    }
    pairs.shuffle(&mut rng);
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic_and_clustered() {
        let g = DescriptorGenerator::new(16, 3.0, 0.5, 1);
        assert_eq!(g, DescriptorGenerator::new(16, 3.0, 0.5, 1));
        let ds = g.dataset(4, 50, 2);
        assert_eq!(ds.len(), 200);
        assert!(ds.iter().all(|d| d.features.iter().all(|f| f.is_finite())));
        // samples sit closer to their own center than to any other
        for d in &ds {
            let own = VegClass::from_class_index(d.label.unwrap()).unwrap();
            let dist = |c: &[f64]| {
                c.iter().zip(&d.features).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
            };
            let d_own = dist(g.center(own));
            for other in VegClass::TRAINED {
                if other != own {
                    assert!(d_own < dist(g.center(other)));
                }
            }
        }
    }

    #[test]
    fn pairs_have_both_labels() {
        let g = DescriptorGenerator::new(8, 3.0, 0.5, 1);
        let pairs = make_pairs(&g.dataset(4, 20, 3), 4);
        assert_eq!(pairs.len(), 160);
        assert_eq!(pairs.iter().filter(|p| p.label == 1).count(), 80);
    }

    #[test]
    fn split_is_stratified() {
        let g = DescriptorGenerator::new(8, 3.0, 0.5, 1);
        let ds = Dataset::split(g.dataset(4, 100, 3), 0.2, 5);
        assert_eq!(ds.test.len(), 80);
        assert_eq!(ds.train.len(), 320);
        for c in 0..4 {
            assert_eq!(ds.test.iter().filter(|d| d.label == Some(c)).count(), 20);
        }
        let refs = ds.references(4, 5);
        assert!(refs.iter().all(|r| r.len() == 5));
    }
}
