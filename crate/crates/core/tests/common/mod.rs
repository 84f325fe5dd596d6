//! Oracles and generators shared by the integration tests. Everything here
//! is written independently of the library code it checks.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use vpc_core::bundle::{BundleSample, EmbeddingBundle};
use vpc_core::corpus::Construction;

/// Random labeled cloud: N <= 50, D <= 5, L in 2..=4, every class has at
/// least two members. Labels are class indices.
pub fn random_cloud(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<usize>) {
    let l = rng.random_range(2..=4);
    let d = rng.random_range(1..=5);
    let n = rng.random_range(2 * l..=50);
    let mut labels: Vec<usize> = (0..n)
        .map(|i| {
            if i < 2 * l {
                i / 2
            } else {
                rng.random_range(0..l)
            }
        })
        .collect();
    labels.shuffle(rng);
    let points = (0..n)
        .map(|i| {
            (0..d)
                .map(|_| rng.random_range(-10.0..10.0) + 3.0 * labels[i] as f64)
                .collect()
        })
        .collect();
    (points, labels)
}

/// Direct evaluation of the GDV from its definition:
/// z-score each dimension with the population standard deviation, halve it,
/// average the intra-class pair distances per class and the cross-class
/// distances per class pair, then combine with the `1/sqrt(D)` factor.
pub fn naive_gdv(points: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = points.len();
    let d = points[0].len();
    let mut s = vec![vec![0.0; d]; n];
    for k in 0..d {
        let mu: f64 = points.iter().map(|p| p[k]).sum::<f64>() / n as f64;
        let var: f64 = points.iter().map(|p| (p[k] - mu).powi(2)).sum::<f64>() / n as f64;
        let sigma = var.sqrt();
        for i in 0..n {
            s[i][k] = if sigma > 0.0 {
                0.5 * (points[i][k] - mu) / sigma
            } else {
                0.0
            };
        }
    }
    let dist = |a: &Vec<f64>, b: &Vec<f64>| -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };

    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort();
    classes.dedup();
    let big_l = classes.len() as f64;

    let mut intra_total = 0.0;
    for &c in &classes {
        let m: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
        let nl = m.len() as f64;
        let mut acc = 0.0;
        for a in 0..m.len() {
            for b in (a + 1)..m.len() {
                acc += dist(&s[m[a]], &s[m[b]]);
            }
        }
        intra_total += 2.0 / (nl * (nl - 1.0)) * acc;
    }
    let mean_intra = intra_total / big_l;

    let mut inter_total = 0.0;
    for (ci, &c1) in classes.iter().enumerate() {
        for &c2 in &classes[ci + 1..] {
            let m1: Vec<usize> = (0..n).filter(|&i| labels[i] == c1).collect();
            let m2: Vec<usize> = (0..n).filter(|&i| labels[i] == c2).collect();
            let mut acc = 0.0;
            for &a in &m1 {
                for &b in &m2 {
                    acc += dist(&s[a], &s[b]);
                }
            }
            inter_total += acc / (m1.len() * m2.len()) as f64;
        }
    }
    let mean_inter = 2.0 / (big_l * (big_l - 1.0)) * inter_total;

    (mean_intra - mean_inter) / (d as f64).sqrt()
}

pub fn label_names(labels: &[usize]) -> Vec<String> {
    labels.iter().map(|l| format!("class{l}")).collect()
}

/// `(input, expected)` cleaning cases. Every cleaning rule is exercised
/// alone and in combination with the others.
pub const CLEANING_CASES: [(&str, &str); 20] = [
    ("The Minister, agreed!", "the minister agreed"),
    ("", ""),
    ("  give   UP  ", "give up"),
    ("already clean", "already clean"),
    ("!!!", ""),
    ("   ", ""),
    ("He said: \"Come back.\"", "he said come back"),
    ("don't give in", "dont give in"),
    ("well-known", "wellknown"),
    ("a | b", "a b"),
    ("tab\tseparated\twords", "tab separated words"),
    ("line\nbreak\r\nhere", "line break here"),
    ("(agree) [on] {it}", "agree on it"),
    ("#1 @home $5 %", "1 home 5"),
    ("x ~ y ^ z ` w", "x y z w"),
    ("A/B\\C", "abc"),
    ("They GAVE AWAY... everything;", "they gave away everything"),
    ("Über CAFÉ", "über café"),
    ("word , word", "word word"),
    ("<come> = + _ out", "come out"),
];

/// Random valid bundle with up to 4 layers, 12 samples and 9 dimensions.
pub fn random_bundle(rng: &mut ChaCha8Rng, tag: usize) -> EmbeddingBundle {
    let num_layers = rng.random_range(1..=4);
    let rows = rng.random_range(1..=12);
    let dim = rng.random_range(1..=9);
    let samples = (0..rows)
        .map(|i| {
            let c = Construction::ALL[rng.random_range(0..Construction::ALL.len())];
            let start = rng.random_range(0..5);
            BundleSample {
                id: format!("doc{tag}:{i}"),
                clean_text: format!("we {} {} today", c.verb_category(), c.particle()),
                construction: c.name().into(),
                verb_category: c.verb_category().as_str().into(),
                subword_span: [start, start + rng.random_range(1..=3)],
            }
        })
        .collect();
    let layers = (0..num_layers)
        .map(|_| {
            (0..rows * dim)
                .map(|_| {
                    // Random bit patterns restricted to finite values, so
                    // subnormals and extreme exponents are covered too.
                    loop {
                        let v = f32::from_bits(rng.random());
                        if v.is_finite() {
                            break v;
                        }
                    }
                })
                .collect()
        })
        .collect();
    EmbeddingBundle {
        model_id: format!("random-model-{tag}"),
        hidden_dim: dim,
        includes_embedding_layer: rng.random_bool(0.5),
        samples,
        layers,
    }
}
