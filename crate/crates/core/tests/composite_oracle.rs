//! Composite features against a direct transcription of their definitions.

use prefmodel_core::featurize::{compose_features, compose_series, Composite, FeatureRegistry, MIN_TURN};
use prefmodel_core::rng;
use prefmodel_core::simulator::{make_agent, simulate_match};
use prefmodel_core::{Mode, PreferenceVector};
use proptest::prelude::*;
use rand::Rng as _;

/// Window sums written out from scratch over 1-based turns.
fn oracle(v: &[f64], w: &[f64], t: usize) -> [f64; 7] {
    let at = |s: &[f64], turn: usize| s[turn - 1];
    let d = |turn: usize| at(v, turn) - at(w, turn);
    let mean5 = |f: &dyn Fn(usize) -> f64| (t - 4..=t).map(f).sum::<f64>() / 5.0;
    [
        at(v, t) - at(v, t - 1),
        mean5(&|k| at(v, k)),
        at(v, t) - at(v, t - 5),
        d(t),
        d(t) - d(t - 1),
        mean5(&d),
        d(t) - d(t - 5),
    ]
}

#[test]
fn thousand_random_pairs_match_oracle() {
    let start = std::time::Instant::now();
    let mut r = rng::seeded(2024);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = r.random_range(6..=60);
        let scale = 10f64.powi(r.random_range(-2..=4));
        let v: Vec<f64> = (0..n).map(|_| scale * r.random_range(-1.0..1.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| scale * r.random_range(-1.0..1.0)).collect();
        for t in MIN_TURN as usize..=n {
            let got = compose_series(&v, &w, t as u32).unwrap();
            let want = oracle(&v, &w, t);
            for (g, e) in got.iter().zip(want) {
                worst = worst.max((g - e).abs() / scale.max(1.0));
            }
        }
    }
    assert!(worst <= 1e-12, "max scaled deviation {worst:e}");
    assert!(start.elapsed().as_secs_f64() < 5.0);
}

#[test]
fn window_boundary() {
    let v = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
    let w = [0.0; 6];
    assert!(compose_series(&v, &w, 5).is_err());
    let c = compose_series(&v, &w, 6).unwrap();
    assert_eq!(
        c[Composite::ALL
            .iter()
            .position(|&k| k == Composite::TrendDerivate)
            .unwrap()],
        31.0
    );
    assert!(compose_series(&v, &w, 7).is_err());
}

#[test]
fn simulated_pair_has_registry_width() {
    let a = make_agent("a", PreferenceVector::from_levels([5, 0, 0, 0, 0, 0]).unwrap(), 1);
    let b = make_agent("b", PreferenceVector::from_levels([0, 0, 2, 5, 0, 0]).unwrap(), 2);
    let (la, lb) = simulate_match(&a, &b, 40, "00", 3).unwrap();
    let row = compose_features(&la, &lb, 40).unwrap();
    assert_eq!(row.len(), FeatureRegistry::new(Mode::Online).len());
    assert_eq!(row[0], 40.0);
}

fn series(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, n)
}

proptest! {
    #[test]
    fn composites_are_linear(
        (v1, w1, v2, w2) in (6usize..30).prop_flat_map(|n| (series(n), series(n), series(n), series(n))),
        a in -5.0f64..5.0,
        b in -5.0f64..5.0,
    ) {
        let n = v1.len();
        let mix = |x: &[f64], y: &[f64]| -> Vec<f64> { x.iter().zip(y).map(|(p, q)| a * p + b * q).collect() };
        let (v, w) = (mix(&v1, &v2), mix(&w1, &w2));
        for t in MIN_TURN as usize..=n {
            let lhs = compose_series(&v, &w, t as u32).unwrap();
            let c1 = compose_series(&v1, &w1, t as u32).unwrap();
            let c2 = compose_series(&v2, &w2, t as u32).unwrap();
            for k in 0..7 {
                prop_assert!((lhs[k] - (a * c1[k] + b * c2[k])).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn self_difference_vanishes(v in (6usize..30).prop_flat_map(series)) {
        for t in MIN_TURN as usize..=v.len() {
            let c = compose_series(&v, &v, t as u32).unwrap();
            for d in &c[3..7] {
                prop_assert_eq!(*d, 0.0);
            }
        }
    }
}
