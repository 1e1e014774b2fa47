//! Behavioral properties of the four learners.

use prefmodel_core::learners::{adaboost, naive_bayes, ripper, svm, LearnerSpec, SvmParams};
use prefmodel_core::{rng, Dataset, Label};
use proptest::prelude::*;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

fn label(b: bool) -> Label {
    if b {
        Label::Positive
    } else {
        Label::Negative
    }
}

fn dataset(rows: &[Vec<f64>], labels: &[Label]) -> Dataset {
    Dataset::from_rows(rows[0].len(), rows, labels).unwrap()
}

/// Points in two blobs separated by a gap of `margin` along a random direction.
fn separable(n: usize, margin: f64, seed: u64) -> Dataset {
    let mut r = rng::seeded(seed);
    let angle: f64 = r.random_range(0.0..std::f64::consts::TAU);
    let (u, v) = (angle.cos(), angle.sin());
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let pos = i % 2 == 0;
        let along = (margin / 2.0 + r.random_range(0.0..3.0)) * if pos { 1.0 } else { -1.0 };
        let across: f64 = r.random_range(-4.0..4.0);
        rows.push(vec![along * u - across * v + 5.0, along * v + across * u - 2.0]);
        labels.push(label(pos));
    }
    dataset(&rows, &labels)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn svm_separable_dual_is_feasible(seed in any::<u64>(), n in 10usize..80) {
        let data = separable(n, 1.0, seed);
        let params = SvmParams::new(1000.0, 0.5);
        let (model, diag) = svm::train_detailed(&data, &params).unwrap();
        for (x, y) in data.rows() {
            prop_assert_eq!(label(model.decision(x) > 0.0), y);
        }
        prop_assert!(diag.max_kkt_residual() < 1e-3);
        prop_assert!(diag.dual_sum().abs() <= 1e-8);
        for &a in &diag.alphas {
            prop_assert!((0.0..=params.cost).contains(&a));
        }
    }

    #[test]
    fn adaboost_error_under_bound(seed in any::<u64>(), n in 20usize..120, rounds in 1usize..25) {
        let mut r = rng::seeded(seed);
        let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![r.random_range(0.0..1.0), r.random_range(0.0..1.0), r.random_range(0.0..1.0)]).collect();
        let labels: Vec<Label> = rows.iter().map(|x| label((x[0] - 0.5) * (x[1] - 0.5) > 0.0 || r.random::<f64>() < 0.1)).collect();
        prop_assume!(labels.iter().any(|l| l.is_positive()) && labels.iter().any(|l| !l.is_positive()));
        let data = dataset(&rows, &labels);
        if let Ok(model) = adaboost::train(&data, rounds) {
            let wrong = data.rows().filter(|(x, y)| label(model.score(x) > 0.0) != *y).count();
            prop_assert!(wrong as f64 / n as f64 <= model.error_bound() + 1e-12);
        }
    }

    #[test]
    fn naive_bayes_posterior_normalizes(seed in any::<u64>()) {
        let mut r = rng::seeded(seed);
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![f64::from(i % 2) * 3.0 + { let z: f64 = StandardNormal.sample(&mut r); z }, r.random_range(-1.0..1.0)]).collect();
        let labels: Vec<Label> = (0..40).map(|i| label(i % 2 == 1)).collect();
        let m = naive_bayes::train(&dataset(&rows, &labels)).unwrap();
        for x in [[0.0, 0.0], [100.0, -100.0], [-1e6, 3.0]] {
            let p = m.posterior(&x);
            prop_assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
            prop_assert!(p.iter().all(|v| v.is_finite()));
        }
    }
}

#[test]
fn svm_bends_around_xor() {
    let rows: Vec<Vec<f64>> = (0..200)
        .map(|i| {
            vec![
                f64::from(i % 20) / 10.0 - 1.0 + 0.05,
                f64::from(i / 20) / 5.0 - 1.0 + 0.1,
            ]
        })
        .collect();
    let labels: Vec<Label> = rows.iter().map(|x| label(x[0] * x[1] > 0.0)).collect();
    let data = dataset(&rows, &labels);
    let rbf = LearnerSpec::Svm(SvmParams::new(100.0, 2.0)).train(&data, 0).unwrap();
    assert!(rbf.accuracy(&data).unwrap() > 0.95);
    // A single axis-aligned split cannot do better than chance-plus-a-bit.
    let stump = LearnerSpec::Adaboost { rounds: 1 }.train(&data, 0);
    if let Ok(s) = stump {
        assert!(s.accuracy(&data).unwrap() < 0.7);
    }
}

#[test]
fn svm_duplicates_with_conflicting_labels() {
    let rows = vec![
        vec![0.0, 0.0],
        vec![0.0, 0.0],
        vec![1.0, 1.0],
        vec![1.0, 1.0],
        vec![2.0, 2.0],
    ];
    let labels = [
        Label::Positive,
        Label::Negative,
        Label::Positive,
        Label::Negative,
        Label::Positive,
    ];
    let (_, diag) = svm::train_detailed(&dataset(&rows, &labels), &SvmParams::new(1.0, 1.0)).unwrap();
    assert!(diag.dual_sum().abs() <= 1e-8);
    assert!(diag.alphas.iter().all(|&a| (0.0..=1.0).contains(&a)));
}

/// Label rule: `(x0 ≥ 60 ∧ x1 ≤ 40) ∨ x2 ≥ 80`.
fn rule_data(n: usize, noise: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<Label>, Vec<Label>) {
    let mut r = rng::seeded(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..4).map(|_| f64::from(r.random_range(0u32..100))).collect())
        .collect();
    let truth: Vec<Label> = rows
        .iter()
        .map(|x| label((x[0] >= 60.0 && x[1] <= 40.0) || x[2] >= 80.0))
        .collect();
    let noisy = truth
        .iter()
        .map(|&y| {
            if r.random::<f64>() < noise {
                label(!y.is_positive())
            } else {
                y
            }
        })
        .collect();
    (rows, truth, noisy)
}

#[test]
fn ripper_recovers_planted_rules() {
    let (rows, _, noisy) = rule_data(3000, 0.05, 1);
    let model = ripper::train(&dataset(&rows, &noisy), 7).unwrap();
    let (fresh, truth, _) = rule_data(3000, 0.0, 2);
    let hits = fresh
        .iter()
        .zip(&truth)
        .filter(|(x, y)| label(model.classify(x)) == **y)
        .count();
    assert!(hits as f64 / 3000.0 >= 0.95, "accuracy {}", hits as f64 / 3000.0);
    let text = model.render("Positive");
    assert!(text.lines().last().unwrap().starts_with("otherwise"));
    for line in text.lines().filter(|l| !l.starts_with("otherwise")) {
        assert!(line.contains(" → Positive ("), "{line}");
        assert!(line.ends_with(')'));
    }
}

#[test]
fn ripper_is_deterministic_per_seed() {
    let (rows, _, noisy) = rule_data(800, 0.05, 3);
    let d = dataset(&rows, &noisy);
    assert_eq!(ripper::train(&d, 5).unwrap(), ripper::train(&d, 5).unwrap());
}
