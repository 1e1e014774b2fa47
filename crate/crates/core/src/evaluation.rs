//! Cross-validated scoring, majority baseline and relative improvement.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::dataset::Corpus;
use crate::error::{Error, Result};
use crate::learners::{LearnerKind, LearnerSpec, SvmParams, TrainedModel};
use crate::preference::{Label, Preference};
use crate::rng;
use crate::sampling::{make_test_split, sample_matches, FoldSpec, MatchKey};
use crate::stats;
use crate::tuning::{grid_search, GridSpec};

/// Accuracy of always predicting the most frequent label.
pub fn majority_baseline(labels: &[Label]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::Domain(String::from("majority baseline of an empty label set")));
    }
    let pos = labels.iter().filter(|l| l.is_positive()).count();
    Ok(pos.max(labels.len() - pos) as f64 / labels.len() as f64)
}

/// `(accuracy − baseline) / baseline`.
pub fn improvement(accuracy: f64, baseline: f64) -> Result<f64> {
    if baseline <= 0.0 {
        return Err(Error::Domain(format!("baseline {baseline} must be positive")));
    }
    Ok((accuracy - baseline) / baseline)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Confusion {
    pub fn record(&mut self, predicted: Label, actual: Label) {
        match (predicted, actual) {
            (Label::Positive, Label::Positive) => self.tp += 1,
            (Label::Positive, Label::Negative) => self.fp += 1,
            (Label::Negative, Label::Negative) => self.tn += 1,
            (Label::Negative, Label::Positive) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }
}

/// Tallies `model`'s predictions against the labels of `data`.
pub fn confusion(model: &TrainedModel, data: &crate::dataset::Dataset) -> Result<Confusion> {
    let mut c = Confusion::default();
    for (p, &y) in model.predict_all(data)?.into_iter().zip(data.labels()) {
        c.record(p, y);
    }
    Ok(c)
}

/// Knobs of one cross-validation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Fraction of each training fold's matches kept by stratified
    /// sub-sampling; `None` trains on the whole fold. Test folds are never
    /// sampled.
    pub sample_perc: Option<f64>,
    pub seed: u64,
    /// When set, SVM hyperparameters are chosen per fold by grid search on
    /// a match-level validation split of the training fold.
    pub svm_grid: Option<GridSpec>,
    pub validation_fraction: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            sample_perc: None,
            seed: 0,
            svm_grid: None,
            validation_fraction: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_matches: usize,
    pub test_matches: usize,
    pub accuracy: Option<f64>,
    pub confusion: Confusion,
    pub failure: Option<String>,
    /// Grid-selected `(c_exp, g_exp)` when SVM tuning ran.
    pub tuned: Option<(i32, i32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub preference: Preference,
    pub learner: LearnerKind,
    pub spec: LearnerSpec,
    pub folds: Vec<FoldResult>,
    /// Accuracies of the successful folds, in fold order.
    pub fold_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// Root-mean-square deviation of fold accuracy about the mean.
    pub rmse: f64,
    pub majority_baseline: f64,
    pub improvement: f64,
    pub confusion: Confusion,
}

fn fold_seed(seed: u64, fold: usize) -> u64 {
    rng::derive(seed, fold as u64)
}

/// Trains on every fold but `fold` and scores on `fold`. Failures are
/// captured in the result rather than returned.
pub fn run_fold(
    spec: &LearnerSpec,
    corpus: &Corpus,
    folds: &FoldSpec,
    fold: usize,
    target: Preference,
    options: &EvalOptions,
) -> FoldResult {
    let mut result = FoldResult {
        fold,
        train_matches: 0,
        test_matches: folds.test_ids(fold).count(),
        accuracy: None,
        confusion: Confusion::default(),
        failure: None,
        tuned: None,
    };
    match fold_inner(spec, corpus, folds, fold, target, options, &mut result) {
        Ok(c) => {
            result.accuracy = Some(c.accuracy());
            result.confusion = c;
        }
        Err(e) => {
            log::warn!("{} / {target}: fold {fold} failed: {e}", spec.kind());
            result.failure = Some(format!("{e}"));
        }
    }
    result
}

fn fold_inner(
    spec: &LearnerSpec,
    corpus: &Corpus,
    folds: &FoldSpec,
    fold: usize,
    target: Preference,
    options: &EvalOptions,
    result: &mut FoldResult,
) -> Result<Confusion> {
    let seed = fold_seed(options.seed, fold);
    let mut train_keys: Vec<MatchKey> = corpus
        .blocks()
        .iter()
        .filter(|b| folds.fold_of(&b.match_id).is_some_and(|f| f != fold))
        .map(|b| b.key(target))
        .collect();
    if let Some(perc) = options.sample_perc {
        train_keys = sample_matches(&train_keys, perc, rng::derive(seed, 1))?;
    }
    result.train_matches = train_keys.len();
    let test = corpus.dataset(folds.test_ids(fold), target);
    if test.is_empty() {
        return Err(Error::Split(format!("fold {fold} has no test instances")));
    }

    let mut spec = *spec;
    if let (LearnerSpec::Svm(_), Some(grid)) = (&spec, &options.svm_grid) {
        let (valid_keys, fit_keys) = make_test_split(&train_keys, options.validation_fraction, rng::derive(seed, 2))?;
        let fit = corpus.dataset(fit_keys.iter().map(|k| k.match_id.as_str()), target);
        let valid = corpus.dataset(valid_keys.iter().map(|k| k.match_id.as_str()), target);
        let outcome = grid_search(&fit, &valid, grid, |d, c, g| {
            LearnerSpec::Svm(SvmParams::new(c, g)).train(d, 0)
        })?;
        result.tuned = Some((outcome.best_c, outcome.best_g));
        spec = LearnerSpec::Svm(SvmParams::from_exponents(outcome.best_c, outcome.best_g));
    }

    let train = corpus.dataset(train_keys.iter().map(|k| k.match_id.as_str()), target);
    let model = spec.train(&train, rng::derive(seed, 3))?;
    confusion(&model, &test)
}

/// Combines fold results. Failed folds are left out of the mean and the
/// dispersion; if every fold failed the report cannot be formed.
pub fn aggregate(
    target: Preference,
    spec: &LearnerSpec,
    folds: Vec<FoldResult>,
    majority_baseline: f64,
) -> Result<EvalReport> {
    let accs: Vec<f64> = folds.iter().filter_map(|f| f.accuracy).collect();
    if accs.is_empty() {
        return Err(Error::Domain(format!("{} / {target}: every fold failed", spec.kind())));
    }
    let mut total = Confusion::default();
    for f in folds.iter().filter(|f| f.accuracy.is_some()) {
        total.merge(&f.confusion);
    }
    let mean = stats::mean(&accs);
    Ok(EvalReport {
        preference: target,
        learner: spec.kind(),
        spec: *spec,
        rmse: stats::rms_deviation(&accs),
        improvement: improvement(mean, majority_baseline)?,
        mean_accuracy: mean,
        fold_accuracies: accs,
        majority_baseline,
        confusion: total,
        folds,
    })
}

/// Sequential k-fold cross-validation.
pub fn cross_validate(
    spec: &LearnerSpec,
    corpus: &Corpus,
    folds: &FoldSpec,
    target: Preference,
    options: &EvalOptions,
) -> Result<EvalReport> {
    let results = (0..folds.k)
        .map(|f| run_fold(spec, corpus, folds, f, target, options))
        .collect();
    let baseline = majority_baseline(&corpus.labels(target))?;
    aggregate(target, spec, results, baseline)
}
