//! Partition and proportion invariants of the match-level samplers.

use std::collections::BTreeSet;

use prefmodel_core::sampling::{make_test_split, sample_matches, stratified_kfold, MatchKey};
use prefmodel_core::Label;
use proptest::prelude::*;

fn keys(pos: usize, neg: usize) -> Vec<MatchKey> {
    (0..pos)
        .map(|i| MatchKey::new(format!("p{i:03}"), Label::Positive))
        .chain((0..neg).map(|i| MatchKey::new(format!("n{i:03}"), Label::Negative)))
        .collect()
}

proptest! {
    #[test]
    fn kfold_partitions_and_balances(pos in 1usize..60, neg in 1usize..60, k in 2usize..12, seed in any::<u64>()) {
        let m = keys(pos, neg);
        prop_assume!(m.len() >= k);
        let f = stratified_kfold(&m, k, seed).unwrap();
        let mut seen = BTreeSet::new();
        for fold in 0..k {
            for id in f.test_ids(fold) {
                prop_assert!(seen.insert(id.to_string()));
            }
        }
        prop_assert_eq!(seen.len(), m.len());
        let sizes = f.fold_sizes();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let per_fold_pos: Vec<usize> = (0..k).map(|fold| f.test_ids(fold).filter(|id| id.starts_with('p')).count()).collect();
        prop_assert!(per_fold_pos.iter().max().unwrap() - per_fold_pos.iter().min().unwrap() <= 1);

        let mut reversed = m.clone();
        reversed.reverse();
        prop_assert_eq!(&stratified_kfold(&reversed, k, seed).unwrap(), &f);
    }

    #[test]
    fn sampling_keeps_floor_of_each_class(pos in 1usize..80, neg in 1usize..80, perc in 0.05f64..1.0, seed in any::<u64>()) {
        let m = keys(pos, neg);
        let s = sample_matches(&m, perc, seed).unwrap();
        let sp = s.iter().filter(|k| k.label == Label::Positive).count();
        prop_assert_eq!(sp, (pos as f64 * perc).floor() as usize);
        prop_assert_eq!(s.len() - sp, (neg as f64 * perc).floor() as usize);
        let all: BTreeSet<_> = m.iter().map(|k| &k.match_id).collect();
        prop_assert!(s.iter().all(|k| all.contains(&k.match_id)));
    }

    #[test]
    fn test_split_is_disjoint_cover(pos in 1usize..80, neg in 1usize..80, frac in 0.05f64..0.9, seed in any::<u64>()) {
        let m = keys(pos, neg);
        prop_assume!((m.len() as f64 * frac).floor() >= 1.0);
        let (test, rest) = make_test_split(&m, frac, seed).unwrap();
        prop_assert_eq!(test.len(), (m.len() as f64 * frac).floor() as usize);
        let a: BTreeSet<_> = test.iter().map(|k| &k.match_id).collect();
        let b: BTreeSet<_> = rest.iter().map(|k| &k.match_id).collect();
        prop_assert!(a.is_disjoint(&b));
        prop_assert_eq!(a.len() + b.len(), m.len());
    }
}

#[test]
fn degenerate_inputs_are_rejected() {
    assert!(stratified_kfold(&keys(3, 0), 2, 1).is_err());
    assert!(stratified_kfold(&keys(1, 1), 3, 1).is_err());
    assert!(stratified_kfold(&keys(5, 5), 1, 1).is_err());
}
