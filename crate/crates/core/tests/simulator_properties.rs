//! The simulator plants what the characterization toolkit should find.

use prefmodel_core::characterize::{characterize_agent, Confidence, Subset};
use prefmodel_core::simulator::{
    generate_dataset, make_agent, make_roster, simulate_match, traditional_roster, TurnPolicy,
};
use prefmodel_core::{rng, Indicator, MatchLog, Outcome, PreferenceVector};

fn culture(level: u8) -> PreferenceVector {
    PreferenceVector::from_levels([level, 0, 0, 0, 0, 0]).unwrap()
}

fn growth(level: u8) -> PreferenceVector {
    PreferenceVector::from_levels([0, 0, level, 0, 0, 0]).unwrap()
}

/// 40 full-length matches of an agent against a fixed neutral opponent.
fn logs_of(pref: PreferenceVector, seed: u64) -> Vec<MatchLog> {
    let me = make_agent("me", pref, seed);
    let opp = make_agent("opp", PreferenceVector::default(), seed ^ 1);
    (0..40)
        .map(|g| {
            simulate_match(&me, &opp, 460, &format!("{g:02}"), rng::derive(seed, g))
                .unwrap()
                .0
        })
        .collect()
}

fn slope(logs: &[MatchLog], ind: Indicator, root: Option<u32>, bps: &[u32]) -> f64 {
    let refs: Vec<&MatchLog> = logs.iter().collect();
    characterize_agent(&refs, ind, root, bps, Subset::General, Confidence::P99)
        .unwrap()
        .fits[0]
        .b1
}

#[test]
fn culture_slopes_are_ordered_by_level() {
    let trials = 20;
    let mut ordered = 0;
    for s in 0..trials {
        let b: Vec<f64> = [0, 2, 5]
            .iter()
            .map(|&l| slope(&logs_of(culture(l), 100 + s), Indicator::Culture, Some(5), &[]))
            .collect();
        ordered += usize::from(b[0] < b[1] && b[1] < b[2]);
    }
    assert_eq!(ordered as u64, trials);
}

#[test]
fn cities_anchors_and_order() {
    let b: Vec<f64> = [0, 2, 5]
        .iter()
        .map(|&l| slope(&logs_of(growth(l), 9), Indicator::Cities, None, &[220]))
        .collect();
    assert!(b[0] < b[1] && b[1] < b[2], "{b:?}");
    assert!((b[0] - 0.0296).abs() < 0.001, "{}", b[0]);
    assert!((b[1] - 0.03143).abs() < 0.001, "{}", b[1]);
}

#[test]
fn outcomes_are_mixed() {
    let logs = generate_dataset(&make_roster(&traditional_roster(), 3), 8, &TurnPolicy::default(), 3).unwrap();
    let wins = logs.iter().filter(|l| l.outcome() == Some(Outcome::Victory)).count();
    assert_eq!(logs.len(), 240);
    assert_eq!(wins, 120);
    for agent in ["alexander", "hatshepsut"] {
        let mine: Vec<_> = logs.iter().filter(|l| l.agent_id() == agent).collect();
        assert_eq!(mine.len(), 40);
        assert!(mine.iter().any(|l| l.outcome() == Some(Outcome::Victory)));
        assert!(mine.iter().any(|l| l.outcome() == Some(Outcome::Defeat)));
        assert!(mine.iter().all(|l| (240..=460).contains(&l.len())));
    }
}
