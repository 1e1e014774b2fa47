//! Match-granular splits.
//!
//! Adjacent turns of one match are near-duplicates, so every split here
//! moves whole matches: a match's turns always land on the same side.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preference::Label;
use crate::rng;

/// A match and its binary label for the current target preference.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MatchKey {
    pub match_id: String,
    pub label: Label,
}

impl MatchKey {
    pub fn new(match_id: impl Into<String>, label: Label) -> Self {
        MatchKey {
            match_id: match_id.into(),
            label,
        }
    }
}

/// Splits by label, each part in match-id order so the result does not
/// depend on the order the caller listed the matches in.
fn partition(matches: &[MatchKey]) -> (Vec<MatchKey>, Vec<MatchKey>) {
    let mut pos: Vec<MatchKey> = matches.iter().filter(|m| m.label.is_positive()).cloned().collect();
    let mut neg: Vec<MatchKey> = matches.iter().filter(|m| !m.label.is_positive()).cloned().collect();
    pos.sort();
    neg.sort();
    (pos, neg)
}

/// Stratified sub-sampling: shuffles the with- and without-preference
/// matches separately and keeps the first `⌊size × perc⌋` of each.
pub fn sample_matches(matches: &[MatchKey], perc: f64, seed: u64) -> Result<Vec<MatchKey>> {
    if !(0.0..=1.0).contains(&perc) {
        return Err(Error::Domain(format!("sampling fraction {perc} outside [0, 1]")));
    }
    let (mut pos, mut neg) = partition(matches);
    let mut r = rng::seeded(seed);
    rng::shuffle(&mut pos, &mut r);
    rng::shuffle(&mut neg, &mut r);
    let take = |n: usize| libm::floor(n as f64 * perc) as usize;
    let (np, nn) = (take(pos.len()), take(neg.len()));
    pos.truncate(np);
    neg.truncate(nn);
    pos.extend(neg);
    Ok(pos)
}

/// Holds out `⌊n × fraction⌋` whole matches, stratified by label.
/// Returns `(test, remainder)`.
pub fn make_test_split(matches: &[MatchKey], fraction: f64, seed: u64) -> Result<(Vec<MatchKey>, Vec<MatchKey>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::Split(format!("test fraction {fraction} outside (0, 1)")));
    }
    let n = matches.len();
    let n_test = libm::floor(n as f64 * fraction) as usize;
    if n_test < 1 {
        return Err(Error::Split(format!(
            "{n} matches at fraction {fraction} leave an empty test set"
        )));
    }
    let (mut pos, mut neg) = partition(matches);
    let mut r = rng::seeded(seed);
    rng::shuffle(&mut pos, &mut r);
    rng::shuffle(&mut neg, &mut r);
    let mut pos_test = libm::round(n_test as f64 * pos.len() as f64 / n as f64) as usize;
    pos_test = pos_test.min(pos.len());
    let neg_test = (n_test - pos_test).min(neg.len());
    let pos_test = n_test - neg_test;

    let mut test: Vec<MatchKey> = pos.drain(..pos_test).collect();
    test.extend(neg.drain(..neg_test));
    pos.extend(neg);
    Ok((test, pos))
}

/// Assignment of every match to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSpec {
    pub k: usize,
    pub seed: u64,
    pub assignment: BTreeMap<String, usize>,
}

impl FoldSpec {
    pub fn fold_of(&self, match_id: &str) -> Option<usize> {
        self.assignment.get(match_id).copied()
    }

    pub fn test_ids(&self, fold: usize) -> impl Iterator<Item = &str> + '_ {
        self.assignment
            .iter()
            .filter(move |(_, &f)| f == fold)
            .map(|(id, _)| id.as_str())
    }

    pub fn train_ids(&self, fold: usize) -> impl Iterator<Item = &str> + '_ {
        self.assignment
            .iter()
            .filter(move |(_, &f)| f != fold)
            .map(|(id, _)| id.as_str())
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![0; self.k];
        for &f in self.assignment.values() {
            sizes[f] += 1;
        }
        sizes
    }
}

/// Stratified k-fold assignment at match granularity.
///
/// Positives are shuffled and dealt round-robin over the folds, then the
/// shuffled negatives continue the deal from the fold where the positives
/// stopped. Each class's per-fold count therefore differs from the ideal
/// by at most one, and fold sizes differ by at most one.
pub fn stratified_kfold(matches: &[MatchKey], k: usize, seed: u64) -> Result<FoldSpec> {
    if k < 2 {
        return Err(Error::Stratification(format!("k = {k}, need at least 2 folds")));
    }
    if matches.len() < k {
        return Err(Error::Stratification(format!(
            "{} matches cannot fill {k} folds",
            matches.len()
        )));
    }
    let (mut pos, mut neg) = partition(matches);
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::Stratification(format!(
            "class counts {} positive / {} negative; both classes are required",
            pos.len(),
            neg.len()
        )));
    }
    let mut r = rng::seeded(seed);
    rng::shuffle(&mut pos, &mut r);
    rng::shuffle(&mut neg, &mut r);
    let mut assignment = BTreeMap::new();
    for (i, m) in pos.into_iter().chain(neg).enumerate() {
        if assignment.insert(m.match_id.clone(), i % k).is_some() {
            return Err(Error::Stratification(format!("duplicate match id `{}`", m.match_id)));
        }
    }
    Ok(FoldSpec { k, seed, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn keys(pos: usize, neg: usize) -> Vec<MatchKey> {
        (0..pos)
            .map(|i| MatchKey::new(format!("p{i:03}"), Label::Positive))
            .chain((0..neg).map(|i| MatchKey::new(format!("n{i:03}"), Label::Negative)))
            .collect()
    }

    #[test]
    fn split_arithmetic_240() {
        let all = keys(80, 160);
        let (test, rest) = make_test_split(&all, 0.1, 1).unwrap();
        assert_eq!(test.len(), 24);
        assert_eq!(rest.len(), 216);
        assert_eq!(sample_matches(&rest, 0.25, 2).unwrap().len(), 54);
    }

    #[test]
    fn sampling_edges() {
        let all = keys(5, 7);
        assert!(sample_matches(&all, 0.0, 3).unwrap().is_empty());
        let mut full = sample_matches(&all, 1.0, 3).unwrap();
        full.sort();
        let mut sorted = all.clone();
        sorted.sort();
        assert_eq!(full, sorted);
        assert!(matches!(sample_matches(&all, 1.5, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn small_test_split() {
        let (test, rest) = make_test_split(&keys(5, 5), 0.1, 9).unwrap();
        assert_eq!((test.len(), rest.len()), (1, 9));
        assert!(matches!(make_test_split(&keys(2, 3), 0.1, 9), Err(Error::Split(_))));
    }

    #[test]
    fn kfold_tallies() {
        let spec = stratified_kfold(&keys(80, 160), 10, 42).unwrap();
        for f in 0..10 {
            let ids: Vec<&str> = spec.test_ids(f).collect();
            let p = ids.iter().filter(|id| id.starts_with('p')).count();
            assert_eq!((p, ids.len() - p), (8, 16));
        }
        assert_eq!(spec, stratified_kfold(&keys(80, 160), 10, 42).unwrap());
    }

    #[test]
    fn kfold_degenerate_two() {
        let spec = stratified_kfold(&keys(1, 1), 2, 0).unwrap();
        assert_eq!(spec.fold_sizes(), [1, 1]);
        assert!(stratified_kfold(&keys(0, 5), 2, 0).is_err());
        assert!(stratified_kfold(&keys(1, 1), 3, 0).is_err());
    }
}
