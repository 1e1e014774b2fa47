//! Exhaustive search over a grid of power-of-two hyperparameters.

use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::learners::TrainedModel;

/// Exponent lists; cell `(c, g)` evaluates cost `2^c` and gamma `2^g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub c_exps: Vec<i32>,
    pub g_exps: Vec<i32>,
}

impl Default for GridSpec {
    /// `c ∈ −5..=15` step 2 and `g ∈ 3..=−15` step −2: 11 × 10 cells.
    fn default() -> Self {
        GridSpec {
            c_exps: (-5..=15).step_by(2).collect(),
            g_exps: (-15..=3).rev().step_by(2).collect(),
        }
    }
}

impl GridSpec {
    pub fn single(c_exp: i32, g_exp: i32) -> Self {
        GridSpec {
            c_exps: alloc::vec![c_exp],
            g_exps: alloc::vec![g_exp],
        }
    }

    pub fn len(&self) -> usize {
        self.c_exps.len() * self.g_exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cells in loop order: outer over `c`, inner over `g`.
    pub fn cells(&self) -> Vec<(i32, i32)> {
        self.c_exps
            .iter()
            .flat_map(|&c| self.g_exps.iter().map(move |&g| (c, g)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub c_exp: i32,
    pub g_exp: i32,
    pub accuracy: f64,
    /// Trainer error message when the cell failed (accuracy is then 0).
    pub failure: Option<String>,
    /// Seconds spent on the cell, filled in by callers that time it.
    pub wall_time: f64,
}

impl GridCell {
    pub fn from_result(c_exp: i32, g_exp: i32, result: Result<f64>) -> Self {
        match result {
            Ok(accuracy) => GridCell {
                c_exp,
                g_exp,
                accuracy,
                failure: None,
                wall_time: 0.0,
            },
            Err(e) => {
                log::warn!("grid cell c=2^{c_exp} g=2^{g_exp} failed: {e}");
                GridCell {
                    c_exp,
                    g_exp,
                    accuracy: 0.0,
                    failure: Some(alloc::format!("{e}")),
                    wall_time: 0.0,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridOutcome {
    pub best_c: i32,
    pub best_g: i32,
    pub best_accuracy: f64,
    pub cells: Vec<GridCell>,
}

/// Picks the winner from evaluated cells given in loop order. A later cell
/// replaces the incumbent only with strictly higher accuracy, so the
/// earliest cell wins ties no matter how the cells were scheduled.
pub fn reduce(cells: Vec<GridCell>) -> Result<GridOutcome> {
    let mut best: Option<usize> = None;
    for (i, cell) in cells.iter().enumerate() {
        if best.is_none_or(|b| cell.accuracy > cells[b].accuracy) {
            best = Some(i);
        }
    }
    let best = best.ok_or_else(|| Error::Domain(String::from("empty hyperparameter grid")))?;
    Ok(GridOutcome {
        best_c: cells[best].c_exp,
        best_g: cells[best].g_exp,
        best_accuracy: cells[best].accuracy,
        cells,
    })
}

/// Evaluates every cell with `eval(c_exp, g_exp)` in loop order.
pub fn grid_search_with(grid: &GridSpec, mut eval: impl FnMut(i32, i32) -> Result<f64>) -> Result<GridOutcome> {
    if grid.is_empty() {
        return Err(Error::Domain(String::from("empty hyperparameter grid")));
    }
    let cells = grid
        .cells()
        .into_iter()
        .map(|(c, g)| GridCell::from_result(c, g, eval(c, g)))
        .collect();
    reduce(cells)
}

/// Trains on `train` with `(2^c, 2^g)` for every cell and scores on
/// `valid` (correct / total).
pub fn grid_search(
    train: &Dataset,
    valid: &Dataset,
    grid: &GridSpec,
    trainer: impl Fn(&Dataset, f64, f64) -> Result<TrainedModel>,
) -> Result<GridOutcome> {
    grid_search_with(grid, |c, g| cell_accuracy(train, valid, c, g, &trainer))
}

pub fn cell_accuracy(
    train: &Dataset,
    valid: &Dataset,
    c_exp: i32,
    g_exp: i32,
    trainer: impl Fn(&Dataset, f64, f64) -> Result<TrainedModel>,
) -> Result<f64> {
    let model = trainer(train, libm::exp2(f64::from(c_exp)), libm::exp2(f64::from(g_exp)))?;
    model.accuracy(valid)
}
