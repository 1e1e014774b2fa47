//! Experiment settings: JSON file, then command-line overrides.

use std::path::Path;

use prefmodel_core::learners::LearnerKind;
use prefmodel_core::{Mode, Preference};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::formats::read_json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub preferences: Vec<Preference>,
    pub learners: Vec<LearnerKind>,
    pub k: usize,
    pub seed: u64,
    /// Fraction of each training fold's matches to keep; `None` keeps all.
    pub perc: Option<f64>,
    pub cutoff: u32,
    /// Tune SVM cost and gamma per fold on the exponential grid.
    pub tune_svm: bool,
    pub adaboost_rounds: usize,
    pub games_per_pair: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Online,
            preferences: Preference::ALL.to_vec(),
            learners: vec![LearnerKind::NaiveBayes, LearnerKind::Adaboost, LearnerKind::Ripper],
            k: 10,
            seed: 0,
            perc: Some(0.25),
            cutoff: prefmodel_core::featurize::DEFAULT_CUTOFF,
            tune_svm: false,
            adaboost_rounds: prefmodel_core::learners::DEFAULT_ROUNDS,
            games_per_pair: 8,
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => read_json(p),
            None => Ok(Self::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_keeps_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"k": 5, "mode": "offline"}"#).unwrap();
        assert_eq!(c.k, 5);
        assert_eq!(c.mode, Mode::Offline);
        assert_eq!(c.cutoff, 100);
        assert_eq!(c.perc, Some(0.25));
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"kk": 5}"#).is_err());
    }
}
