//! Dense training matrices and match-grouped corpora.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::featurize::{drop_early_turns, featurize_match, FeatureRegistry, Fingerprint, Instance, Mode};
use crate::preference::{Label, Preference, PreferenceVector};
use crate::sampling::MatchKey;
use crate::telemetry::{pair_logs, MatchLog};

/// Row-major feature matrix with one binary label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    x: Vec<f64>,
    y: Vec<Label>,
}

impl Dataset {
    /// Empty dataset over anonymous features `x0..x{n-1}`.
    pub fn new(n_features: usize) -> Self {
        Self::with_names((0..n_features).map(|i| format!("x{i}")).collect())
    }

    pub fn with_names(names: Vec<String>) -> Self {
        Dataset {
            names,
            x: Vec::new(),
            y: Vec::new(),
        }
    }

    pub fn for_registry(registry: &FeatureRegistry) -> Self {
        Self::with_names(registry.names())
    }

    pub fn from_rows<R: AsRef<[f64]>>(n_features: usize, rows: &[R], labels: &[Label]) -> Result<Self> {
        let mut d = Dataset::new(n_features);
        if rows.len() != labels.len() {
            return Err(Error::Contract(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        for (r, &l) in rows.iter().zip(labels) {
            d.push(r.as_ref(), l)?;
        }
        Ok(d)
    }

    pub fn from_instances<'a>(names: Vec<String>, instances: impl IntoIterator<Item = &'a Instance>) -> Result<Self> {
        let mut d = Dataset::with_names(names);
        for inst in instances {
            d.push(&inst.features, inst.label)?;
        }
        Ok(d)
    }

    pub fn push(&mut self, row: &[f64], label: Label) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::Contract(format!(
                "row has {} features, dataset expects {}",
                row.len(),
                self.names.len()
            )));
        }
        self.x.extend_from_slice(row);
        self.y.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn fingerprint(&self) -> Fingerprint {
        Fingerprint::of_names(self.names.iter().map(String::as_str))
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.names.len();
        &self.x[i * d..(i + 1) * d]
    }

    #[inline]
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.x[i * self.names.len() + j]
    }

    #[inline]
    pub fn label(&self, i: usize) -> Label {
        self.y[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.y
    }

    pub fn rows(&self) -> impl Iterator<Item = (&[f64], Label)> + '_ {
        (0..self.len()).map(move |i| (self.row(i), self.y[i]))
    }

    /// `(positives, negatives)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let p = self.y.iter().filter(|l| l.is_positive()).count();
        (p, self.y.len() - p)
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let mut d = Dataset::with_names(self.names.clone());
        d.x.reserve(indices.len() * self.n_features());
        for &i in indices {
            d.x.extend_from_slice(self.row(i));
            d.y.push(self.y[i]);
        }
        d
    }

    /// Appends every row of `other` (which must share the feature names).
    pub fn extend(&mut self, other: &Dataset) -> Result<()> {
        if other.names != self.names {
            return Err(Error::Contract(String::from("feature names differ")));
        }
        self.x.extend_from_slice(&other.x);
        self.y.extend_from_slice(&other.y);
        Ok(())
    }
}

/// Featurized turns of one match log, independent of the target preference.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchBlock {
    pub match_id: String,
    pub agent_id: String,
    pub preference: PreferenceVector,
    pub turns: Vec<u32>,
    /// Row-major, `turns.len()` rows.
    pub features: Vec<f64>,
}

impl MatchBlock {
    pub fn key(&self, target: Preference) -> MatchKey {
        MatchKey {
            match_id: self.match_id.clone(),
            label: self.preference.label(target),
        }
    }
}

/// Every featurized match of a data set, in match-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    mode: Mode,
    names: Vec<String>,
    blocks: Vec<MatchBlock>,
}

impl Corpus {
    /// Pairs the logs with their opponents, expands every turn past
    /// `cutoff` and groups the rows by match.
    pub fn from_logs(logs: &[MatchLog], mode: Mode, cutoff: u32) -> Result<Self> {
        let pairs = pair_logs(logs)?;
        let registry = FeatureRegistry::new(mode);
        let d = registry.len();
        let mut blocks = Vec::with_capacity(logs.len());
        for (own, opp) in pairs {
            let (own, opp) = (&logs[own], &logs[opp]);
            // The label is irrelevant here; labels are attached per target later.
            let inst = drop_early_turns(featurize_match(own, opp, mode, Preference::Culture)?, cutoff);
            let mut features = Vec::with_capacity(inst.len() * d);
            let mut turns = Vec::with_capacity(inst.len());
            for i in inst {
                features.extend_from_slice(&i.features);
                turns.push(i.turn);
            }
            blocks.push(MatchBlock {
                match_id: String::from(own.match_id()),
                agent_id: String::from(own.agent_id()),
                preference: *own.preference(),
                turns,
                features,
            });
        }
        blocks.sort_by(|a, b| a.match_id.cmp(&b.match_id));
        Ok(Corpus {
            mode,
            names: registry.names(),
            blocks,
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn blocks(&self) -> &[MatchBlock] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn n_instances(&self) -> usize {
        self.blocks.iter().map(|b| b.turns.len()).sum()
    }

    pub fn keys(&self, target: Preference) -> Vec<MatchKey> {
        self.blocks.iter().map(|b| b.key(target)).collect()
    }

    /// All instance labels for `target`.
    pub fn labels(&self, target: Preference) -> Vec<Label> {
        self.blocks
            .iter()
            .flat_map(|b| core::iter::repeat_n(b.preference.label(target), b.turns.len()))
            .collect()
    }

    /// Rows of the selected matches, labeled for `target`.
    pub fn dataset<'a>(&self, ids: impl IntoIterator<Item = &'a str>, target: Preference) -> Dataset {
        let wanted: BTreeSet<&str> = ids.into_iter().collect();
        self.dataset_where(|b| wanted.contains(b.match_id.as_str()), target)
    }

    pub fn dataset_where(&self, mut keep: impl FnMut(&MatchBlock) -> bool, target: Preference) -> Dataset {
        let mut d = Dataset::with_names(self.names.clone());
        for b in self.blocks.iter().filter(|b| keep(b)) {
            d.x.extend_from_slice(&b.features);
            d.y.extend(core::iter::repeat_n(b.preference.label(target), b.turns.len()));
        }
        d
    }

    /// Instances of every match labeled for `target`, for serialization.
    pub fn instances(&self, target: Preference) -> Vec<Instance> {
        let d = self.names.len();
        let mut out = Vec::with_capacity(self.n_instances());
        for b in &self.blocks {
            let label = b.preference.label(target);
            for (r, &turn) in b.turns.iter().enumerate() {
                out.push(Instance {
                    features: b.features[r * d..(r + 1) * d].to_vec(),
                    label,
                    match_id: b.match_id.clone(),
                    turn,
                });
            }
        }
        out
    }
}
