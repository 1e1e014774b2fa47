//! Fold- and cell-parallel execution. Work items are independent and are
//! collected back in their sequential order, so results do not depend on
//! the number of threads.

use std::time::Instant;

use prefmodel_core::dataset::Corpus;
use prefmodel_core::evaluation::{aggregate, majority_baseline, run_fold, EvalOptions, EvalReport, FoldResult};
use prefmodel_core::learners::{LearnerSpec, SvmParams};
use prefmodel_core::sampling::FoldSpec;
use prefmodel_core::tuning::{cell_accuracy, reduce, GridCell, GridOutcome, GridSpec};
use prefmodel_core::{Dataset, Preference};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// A pool with `jobs` threads, or one per core when `None`.
pub fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::Usage("--jobs must be at least 1".into()));
        }
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| Error::Usage(format!("cannot start {jobs:?} worker threads: {e}")))
}

pub fn run_folds(
    pool: &rayon::ThreadPool,
    spec: &LearnerSpec,
    corpus: &Corpus,
    folds: &FoldSpec,
    target: Preference,
    options: &EvalOptions,
) -> Vec<FoldResult> {
    pool.install(|| {
        (0..folds.k)
            .into_par_iter()
            .map(|f| run_fold(spec, corpus, folds, f, target, options))
            .collect()
    })
}

/// Cross-validation with folds run in parallel.
pub fn cross_validate(
    pool: &rayon::ThreadPool,
    spec: &LearnerSpec,
    corpus: &Corpus,
    folds: &FoldSpec,
    target: Preference,
    options: &EvalOptions,
) -> Result<EvalReport> {
    let results = run_folds(pool, spec, corpus, folds, target, options);
    let baseline = majority_baseline(&corpus.labels(target))?;
    Ok(aggregate(target, spec, results, baseline)?)
}

/// Evaluates every cell with `eval`, timing each, and reduces in loop order.
pub fn grid_search<F>(pool: &rayon::ThreadPool, grid: &GridSpec, eval: F) -> Result<GridOutcome>
where
    F: Fn(i32, i32) -> prefmodel_core::Result<f64> + Sync,
{
    let cells: Vec<GridCell> = pool.install(|| {
        grid.cells()
            .into_par_iter()
            .map(|(c, g)| {
                let start = Instant::now();
                let mut cell = GridCell::from_result(c, g, eval(c, g));
                cell.wall_time = start.elapsed().as_secs_f64();
                cell
            })
            .collect()
    });
    Ok(reduce(cells)?)
}

/// SVM grid search: train on `train`, score on `valid`.
pub fn svm_grid(pool: &rayon::ThreadPool, train: &Dataset, valid: &Dataset, grid: &GridSpec) -> Result<GridOutcome> {
    grid_search(pool, grid, |c, g| {
        cell_accuracy(train, valid, c, g, |d, cost, gamma| {
            LearnerSpec::Svm(SvmParams::new(cost, gamma)).train(d, 0)
        })
    })
}
