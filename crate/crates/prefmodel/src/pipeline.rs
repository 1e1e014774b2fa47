//! End-to-end experiments built from the core stages.

use prefmodel_core::dataset::Corpus;
use prefmodel_core::evaluation::{majority_baseline, EvalOptions, EvalReport};
use prefmodel_core::learners::{LearnerKind, LearnerSpec};
use prefmodel_core::sampling::{stratified_kfold, FoldSpec};
use prefmodel_core::simulator::{generate_dataset, make_roster, RosterEntry, TurnPolicy};
use prefmodel_core::tuning::GridSpec;
use prefmodel_core::{rng, MatchLog, Preference};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::runner;

pub fn learner_spec(kind: LearnerKind, cfg: &ExperimentConfig) -> LearnerSpec {
    match kind {
        LearnerKind::Adaboost => LearnerSpec::Adaboost {
            rounds: cfg.adaboost_rounds,
        },
        other => LearnerSpec::default_for(other),
    }
}

/// Fold seed of a preference: every learner sees the same folds.
pub fn fold_seed(seed: u64, target: Preference) -> u64 {
    rng::derive(seed, 0x100 + target.index() as u64)
}

pub fn folds_for(corpus: &Corpus, target: Preference, k: usize, seed: u64) -> Result<FoldSpec> {
    Ok(stratified_kfold(&corpus.keys(target), k, fold_seed(seed, target))?)
}

pub fn eval_options(cfg: &ExperimentConfig, target: Preference) -> EvalOptions {
    EvalOptions {
        sample_perc: cfg.perc,
        seed: rng::derive(cfg.seed, 0x200 + target.index() as u64),
        svm_grid: cfg.tune_svm.then(GridSpec::default),
        ..EvalOptions::default()
    }
}

pub fn simulate(
    roster: &[RosterEntry],
    games_per_pair: usize,
    policy: &TurnPolicy,
    seed: u64,
) -> Result<Vec<MatchLog>> {
    let agents = make_roster(roster, rng::derive(seed, 1));
    Ok(generate_dataset(&agents, games_per_pair, policy, rng::derive(seed, 2))?)
}

/// What a batch run produced and what failed along the way.
#[derive(Debug, Default)]
pub struct BatchOutcome {
    pub reports: Vec<EvalReport>,
    pub failures: Vec<String>,
}

/// Cross-validates every configured learner on every configured preference.
pub fn evaluate_all(pool: &rayon::ThreadPool, corpus: &Corpus, cfg: &ExperimentConfig) -> BatchOutcome {
    let mut out = BatchOutcome::default();
    for &target in &cfg.preferences {
        let folds = match folds_for(corpus, target, cfg.k, cfg.seed) {
            Ok(f) => f,
            Err(e) => {
                out.failures.push(format!("{target}: folds: {e}"));
                continue;
            }
        };
        let options = eval_options(cfg, target);
        for &kind in &cfg.learners {
            let spec = learner_spec(kind, cfg);
            match runner::cross_validate(pool, &spec, corpus, &folds, target, &options) {
                Ok(r) => {
                    for f in r.folds.iter().filter(|f| f.failure.is_some()) {
                        log::warn!("{kind} / {target}: fold {} excluded", f.fold);
                    }
                    out.reports.push(r);
                }
                Err(e) => out.failures.push(format!("{kind} / {target}: {e}")),
            }
        }
    }
    out
}

/// Accuracy of a model trained on one roster and tested on another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferResult {
    pub preference: Preference,
    pub learner: LearnerKind,
    pub accuracy: f64,
    pub majority_baseline: f64,
}

pub fn evaluate_transfer(
    train: &Corpus,
    test: &Corpus,
    spec: &LearnerSpec,
    target: Preference,
    seed: u64,
) -> Result<TransferResult> {
    let model = spec.train(&train.dataset_where(|_| true, target), seed)?;
    let data = test.dataset_where(|_| true, target);
    Ok(TransferResult {
        preference: target,
        learner: spec.kind(),
        accuracy: model.accuracy(&data)?,
        majority_baseline: majority_baseline(data.labels())?,
    })
}
