mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vpc_core::geometry::{gdv, LabeledCloud};

use common::{label_names, naive_gdv, random_cloud};

fn module_gdv(points: &[Vec<f64>], labels: &[String]) -> f64 {
    gdv(&LabeledCloud::from_rows(points, labels.to_vec()).unwrap())
        .unwrap()
        .gdv
}

#[test]
fn matches_direct_evaluation_on_random_clouds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..200 {
        let (points, labels) = random_cloud(&mut rng);
        let expected = naive_gdv(&points, &labels);
        let actual = module_gdv(&points, &label_names(&labels));
        assert!(
            (expected - actual).abs() <= 1e-9,
            "case {case}: {actual} vs {expected}"
        );
    }
}

#[test]
fn oracle_reproduces_hand_values() {
    let two = naive_gdv(
        &[vec![0.0], vec![1.0], vec![10.0], vec![11.0]],
        &[0, 0, 1, 1],
    );
    assert!((two - -0.89553).abs() < 1e-4);
    let square = naive_gdv(
        &[
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![4.0, 0.0],
            vec![4.0, 1.0],
        ],
        &[0, 0, 1, 1],
    );
    assert!((square - -0.14645).abs() < 1e-4);
}

#[test]
fn constant_dimension_still_counts_in_normalization() {
    let pts = vec![
        vec![0.0, 5.0],
        vec![1.0, 5.0],
        vec![10.0, 5.0],
        vec![11.0, 5.0],
    ];
    let labels = label_names(&[0, 0, 1, 1]);
    let with_constant = module_gdv(&pts, &labels);
    let one_d: Vec<Vec<f64>> = pts.iter().map(|p| vec![p[0]]).collect();
    let without = module_gdv(&one_d, &labels);
    assert!((with_constant - without / 2f64.sqrt()).abs() < 1e-12);
    assert!((with_constant - naive_gdv(&pts, &[0, 0, 1, 1])).abs() < 1e-12);
}

fn cloud_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>)> {
    any::<u64>().prop_map(|seed| random_cloud(&mut ChaCha8Rng::seed_from_u64(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariant_under_scaling_and_shifting(
        (points, labels) in cloud_strategy(),
        a_idx in 0usize..3,
        negate in any::<bool>(),
        b in -100.0f64..100.0,
    ) {
        let a = [1e-3, 1.0, 1e3][a_idx] * if negate { -1.0 } else { 1.0 };
        let names = label_names(&labels);
        let base = module_gdv(&points, &names);
        let moved: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|v| a * v + b).collect()).collect();
        prop_assert!((module_gdv(&moved, &names) - base).abs() <= 1e-9);
    }

    #[test]
    fn invariant_under_dimension_permutation((points, labels) in cloud_strategy(), seed in any::<u64>()) {
        let names = label_names(&labels);
        let base = module_gdv(&points, &names);
        let mut perm: Vec<usize> = (0..points[0].len()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let permuted: Vec<Vec<f64>> = points.iter().map(|p| perm.iter().map(|&k| p[k]).collect()).collect();
        prop_assert!((module_gdv(&permuted, &names) - base).abs() <= 1e-9);
    }

    #[test]
    fn invariant_under_dimension_duplication((points, labels) in cloud_strategy()) {
        let names = label_names(&labels);
        let base = module_gdv(&points, &names);
        let doubled: Vec<Vec<f64>> = points.iter().map(|p| p.iter().chain(p).copied().collect()).collect();
        prop_assert!((module_gdv(&doubled, &names) - base).abs() <= 1e-9);
    }

    #[test]
    fn exactly_invariant_under_row_shuffle((points, labels) in cloud_strategy(), seed in any::<u64>()) {
        let names = label_names(&labels);
        let base = module_gdv(&points, &names);
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let p2: Vec<Vec<f64>> = order.iter().map(|&i| points[i].clone()).collect();
        let n2: Vec<String> = order.iter().map(|&i| names[i].clone()).collect();
        prop_assert_eq!(module_gdv(&p2, &n2).to_bits(), base.to_bits());
    }

    #[test]
    fn exactly_invariant_under_label_renaming((points, labels) in cloud_strategy(), seed in any::<u64>()) {
        let base = module_gdv(&points, &label_names(&labels));
        // A bijection that also changes the sort order of the class names.
        let mut targets = ["zeta", "alpha", "mu", "beta"];
        targets.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let renamed: Vec<String> = labels.iter().map(|&l| targets[l].to_owned()).collect();
        prop_assert_eq!(module_gdv(&points, &renamed).to_bits(), base.to_bits());
    }
}
