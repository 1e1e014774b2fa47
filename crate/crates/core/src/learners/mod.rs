//! The four classifier families behind one train/predict contract.
//!
//! Every model scores an input with a real number and predicts `+1` only for
//! strictly positive scores, so exact ties fall to `−1` (no preference).

pub mod adaboost;
pub mod naive_bayes;
pub mod ripper;
pub mod svm;

use core::fmt;

use alloc::format;
use alloc::string::String;
use serde::{Deserialize, Serialize};

pub use adaboost::{AdaBoostModel, Stump};
pub use naive_bayes::NaiveBayesModel;
pub use ripper::{Condition, Op, Rule, RuleSet};
pub use svm::{SvmModel, SvmParams};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::featurize::Fingerprint;
use crate::preference::Label;

/// Current version of the serialized model envelope.
pub const MODEL_VERSION: u32 = 1;

/// Default boosting rounds.
pub const DEFAULT_ROUNDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    NaiveBayes,
    Adaboost,
    Ripper,
    Svm,
}

impl LearnerKind {
    pub const ALL: [LearnerKind; 4] = [
        LearnerKind::NaiveBayes,
        LearnerKind::Adaboost,
        LearnerKind::Ripper,
        LearnerKind::Svm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LearnerKind::NaiveBayes => "naive_bayes",
            LearnerKind::Adaboost => "adaboost",
            LearnerKind::Ripper => "ripper",
            LearnerKind::Svm => "svm",
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for LearnerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "naive_bayes" | "nb" | "naivebayes" => Ok(LearnerKind::NaiveBayes),
            "adaboost" | "boost" => Ok(LearnerKind::Adaboost),
            "ripper" | "jrip" => Ok(LearnerKind::Ripper),
            "svm" | "smo" => Ok(LearnerKind::Svm),
            _ => Err(Error::Domain(format!("unknown learner `{s}`"))),
        }
    }
}

/// Learner family plus its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerSpec {
    NaiveBayes,
    Adaboost { rounds: usize },
    Ripper,
    Svm(SvmParams),
}

impl LearnerSpec {
    /// Family defaults: 10 boosting rounds, SVM with `C = 1` and
    /// `γ = 1 / n_features`.
    pub fn default_for(kind: LearnerKind) -> Self {
        match kind {
            LearnerKind::NaiveBayes => LearnerSpec::NaiveBayes,
            LearnerKind::Adaboost => LearnerSpec::Adaboost { rounds: DEFAULT_ROUNDS },
            LearnerKind::Ripper => LearnerSpec::Ripper,
            LearnerKind::Svm => LearnerSpec::Svm(SvmParams::default()),
        }
    }

    pub fn kind(&self) -> LearnerKind {
        match self {
            LearnerSpec::NaiveBayes => LearnerKind::NaiveBayes,
            LearnerSpec::Adaboost { .. } => LearnerKind::Adaboost,
            LearnerSpec::Ripper => LearnerKind::Ripper,
            LearnerSpec::Svm(_) => LearnerKind::Svm,
        }
    }

    /// Trains on `data`. `seed` drives the only randomized trainer (the
    /// RIPPER grow/prune split); the others ignore it.
    pub fn train(&self, data: &Dataset, seed: u64) -> Result<TrainedModel> {
        let model = match *self {
            LearnerSpec::NaiveBayes => Model::NaiveBayes(naive_bayes::train(data)?),
            LearnerSpec::Adaboost { rounds } => Model::Adaboost(adaboost::train(data, rounds)?),
            LearnerSpec::Ripper => Model::Ripper(ripper::train(data, seed)?),
            LearnerSpec::Svm(p) => Model::Svm(svm::train(data, &p)?),
        };
        Ok(TrainedModel {
            version: MODEL_VERSION,
            registry_fingerprint: data.fingerprint(),
            n_features: data.n_features(),
            model,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Model {
    NaiveBayes(NaiveBayesModel),
    Adaboost(AdaBoostModel),
    Ripper(RuleSet),
    Svm(SvmModel),
}

/// Versioned model envelope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub version: u32,
    pub registry_fingerprint: Fingerprint,
    pub n_features: usize,
    #[serde(flatten)]
    pub model: Model,
}

impl TrainedModel {
    pub fn kind(&self) -> LearnerKind {
        match self.model {
            Model::NaiveBayes(_) => LearnerKind::NaiveBayes,
            Model::Adaboost(_) => LearnerKind::Adaboost,
            Model::Ripper(_) => LearnerKind::Ripper,
            Model::Svm(_) => LearnerKind::Svm,
        }
    }

    /// Real-valued decision score; positive means `+1`.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::Contract(format!(
                "input has {} features, model expects {}",
                x.len(),
                self.n_features
            )));
        }
        Ok(match &self.model {
            Model::NaiveBayes(m) => m.score(x),
            Model::Adaboost(m) => m.score(x),
            Model::Ripper(m) => m.score(x),
            Model::Svm(m) => m.decision(x),
        })
    }

    /// Predicts a row laid out by the registry with fingerprint `registry`.
    pub fn predict(&self, registry: Fingerprint, x: &[f64]) -> Result<Label> {
        if registry != self.registry_fingerprint {
            return Err(Error::Contract(format!(
                "feature registry {registry} does not match the model's {}",
                self.registry_fingerprint
            )));
        }
        self.score(x).map(Label::from_score)
    }

    /// Predictions for every row of `data`.
    pub fn predict_all(&self, data: &Dataset) -> Result<alloc::vec::Vec<Label>> {
        let fp = data.fingerprint();
        (0..data.len()).map(|i| self.predict(fp, data.row(i))).collect()
    }

    /// Fraction of rows of `data` classified correctly.
    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        if data.is_empty() {
            return Err(Error::Domain(String::from("accuracy of an empty dataset")));
        }
        let pred = self.predict_all(data)?;
        let hits = pred.iter().zip(data.labels()).filter(|(p, y)| p == y).count();
        Ok(hits as f64 / data.len() as f64)
    }
}

/// Both classes must be present for every trainer except RIPPER.
pub(crate) fn require_both_classes(data: &Dataset) -> Result<(usize, usize)> {
    let (p, n) = data.class_counts();
    if p == 0 || n == 0 {
        return Err(Error::DegenerateClass(format!(
            "{p} positive and {n} negative instances; both classes are required"
        )));
    }
    Ok((p, n))
}
