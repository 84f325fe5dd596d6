//! Generator for synthetic bundles with a controlled layer-wise trend.
//!
//! Every construction gets a random class mean; a sample's vector at layer
//! `l` is `separation(l) * mean + noise`. The separation follows a Gaussian
//! bump over the layers, so class separability (and hence the most negative
//! GDV) peaks at a chosen layer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bundle::{BundleSample, EmbeddingBundle};
use crate::corpus::Construction;

#[derive(Debug, Clone, PartialEq)]
pub struct LayerTrendConfig {
    pub model_id: String,
    pub num_layers: usize,
    pub peak_layer: usize,
    pub samples_per_construction: usize,
    pub hidden_dim: usize,
    pub base_separation: f64,
    pub peak_separation: f64,
    /// Width (in layers) of the separation bump.
    pub width: f64,
    /// Per-layer noise added on top of each sample's fixed noise vector.
    pub layer_noise: f64,
    pub seed: u64,
}

impl Default for LayerTrendConfig {
    fn default() -> Self {
        Self {
            model_id: "synthetic-layer-trend".into(),
            num_layers: 12,
            peak_layer: 6,
            samples_per_construction: 12,
            hidden_dim: 16,
            base_separation: 0.2,
            peak_separation: 2.0,
            width: 2.5,
            layer_noise: 0.05,
            seed: 7,
        }
    }
}

impl LayerTrendConfig {
    pub fn separation(&self, layer: usize) -> f64 {
        let z = (layer as f64 - self.peak_layer as f64) / self.width;
        self.base_separation + self.peak_separation * (-z * z).exp()
    }
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Builds a bundle with all eleven constructions and layers `1..=num_layers`.
pub fn layer_trend_bundle(cfg: &LayerTrendConfig) -> EmbeddingBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = cfg.hidden_dim;
    let means: Vec<Vec<f64>> = Construction::ALL
        .iter()
        .map(|_| gaussian_vec(&mut rng, d))
        .collect();

    let mut samples = Vec::new();
    let mut base_noise = Vec::new();
    let mut classes = Vec::new();
    for (ci, c) in Construction::ALL.iter().enumerate() {
        for i in 0..cfg.samples_per_construction {
            samples.push(BundleSample {
                id: format!("{}_{i:03}", c.name()),
                clean_text: format!("they will {} {} soon", c.verb_category(), c.particle()),
                construction: c.name().into(),
                verb_category: c.verb_category().as_str().into(),
                subword_span: [2, 3],
            });
            base_noise.push(gaussian_vec(&mut rng, d));
            classes.push(ci);
        }
    }

    let layers = (1..=cfg.num_layers)
        .map(|layer| {
            let sep = cfg.separation(layer);
            let mut m = Vec::with_capacity(samples.len() * d);
            for (noise, &ci) in base_noise.iter().zip(&classes) {
                for j in 0..d {
                    let jitter: f64 = rng.sample(StandardNormal);
                    m.push((sep * means[ci][j] + noise[j] + cfg.layer_noise * jitter) as f32);
                }
            }
            m
        })
        .collect();

    EmbeddingBundle {
        model_id: cfg.model_id.clone(),
        hidden_dim: d,
        includes_embedding_layer: false,
        samples,
        layers,
    }
}
