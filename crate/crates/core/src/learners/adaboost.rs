//! Discrete AdaBoost over depth-1 decision stumps.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::require_both_classes;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Weighted errors are clamped to this before computing a vote weight, so a
/// perfect stump gets a large but finite vote.
const MIN_ERROR: f64 = 1e-12;

/// `polarity` if `x[feature] > threshold`, else `−polarity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub feature: usize,
    pub threshold: f64,
    pub polarity: i8,
}

impl Stump {
    #[inline]
    pub fn predict(&self, x: &[f64]) -> f64 {
        let p = f64::from(self.polarity);
        if x[self.feature] > self.threshold {
            p
        } else {
            -p
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub stump: Stump,
    pub alpha: f64,
    /// Weighted training error of the stump when it was chosen.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdaBoostModel {
    pub rounds: Vec<Round>,
}

impl AdaBoostModel {
    pub fn score(&self, x: &[f64]) -> f64 {
        self.rounds.iter().map(|r| r.alpha * r.stump.predict(x)).sum()
    }

    /// `Π_t 2·√(ε_t(1−ε_t))`, the classical bound on training error.
    pub fn error_bound(&self) -> f64 {
        self.rounds
            .iter()
            .map(|r| 2.0 * libm::sqrt(r.error * (1.0 - r.error)))
            .product()
    }
}

/// Per-round diagnostics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    /// Sum of the instance weights after each reweighting.
    pub weight_sums: Vec<f64>,
}

pub fn train(data: &Dataset, rounds: usize) -> Result<AdaBoostModel> {
    train_traced(data, rounds).map(|(m, _)| m)
}

/// Boosts for up to `rounds` rounds, stopping early when the best stump's
/// weighted error reaches ½ (that round is discarded) or hits zero (that
/// round is kept).
pub fn train_traced(data: &Dataset, rounds: usize) -> Result<(AdaBoostModel, Trace)> {
    if rounds == 0 {
        return Err(Error::Domain(alloc::string::String::from(
            "boosting needs at least one round",
        )));
    }
    require_both_classes(data)?;
    let n = data.len();
    let y: Vec<f64> = data.labels().iter().map(|l| l.sign()).collect();
    let order = presort(data);
    let mut w = vec![1.0 / n as f64; n];
    let mut model = AdaBoostModel { rounds: Vec::new() };
    let mut trace = Trace::default();

    for t in 0..rounds {
        let (stump, eps) = best_stump(data, &order, &y, &w);
        if eps >= 0.5 {
            if t == 0 {
                return Err(Error::WeakLearner { error: eps });
            }
            break;
        }
        let e = eps.max(MIN_ERROR);
        let alpha = 0.5 * libm::log((1.0 - e) / e);
        for i in 0..n {
            w[i] *= libm::exp(-alpha * y[i] * stump.predict(data.row(i)));
        }
        let z: f64 = w.iter().sum();
        for wi in &mut w {
            *wi /= z;
        }
        trace.weight_sums.push(w.iter().sum());
        model.rounds.push(Round {
            stump,
            alpha,
            error: eps,
        });
        if eps <= 0.0 {
            break;
        }
    }
    Ok((model, trace))
}

/// Row indices sorted by each feature's value.
fn presort(data: &Dataset) -> Vec<Vec<u32>> {
    (0..data.n_features())
        .map(|j| {
            let mut idx: Vec<u32> = (0..data.len() as u32).collect();
            idx.sort_by(|&a, &b| data.value(a as usize, j).total_cmp(&data.value(b as usize, j)));
            idx
        })
        .collect()
}

/// Lowest weighted-error stump. Thresholds are midpoints between distinct
/// consecutive values plus one below the minimum; the first stump in
/// (feature, threshold, polarity +1 before −1) order wins ties.
fn best_stump(data: &Dataset, order: &[Vec<u32>], y: &[f64], w: &[f64]) -> (Stump, f64) {
    let total: f64 = w.iter().sum();
    let w_neg: f64 = w.iter().zip(y).filter(|(_, &yi)| yi < 0.0).map(|(wi, _)| wi).sum();
    let mut best = Stump {
        feature: 0,
        threshold: f64::NEG_INFINITY,
        polarity: 1,
    };
    let mut best_err = f64::INFINITY;
    for (j, idx) in order.iter().enumerate() {
        // Threshold below every value: everything predicted `polarity`.
        let first = data.value(idx[0] as usize, j);
        let mut err_pos = w_neg;
        let consider = |thr: f64, err_pos: f64, best: &mut Stump, best_err: &mut f64| {
            let err_neg = total - err_pos;
            if err_pos < *best_err {
                *best_err = err_pos;
                *best = Stump {
                    feature: j,
                    threshold: thr,
                    polarity: 1,
                };
            }
            if err_neg < *best_err {
                *best_err = err_neg;
                *best = Stump {
                    feature: j,
                    threshold: thr,
                    polarity: -1,
                };
            }
        };
        consider(first - 1.0, err_pos, &mut best, &mut best_err);
        for k in 0..idx.len() {
            let i = idx[k] as usize;
            // Row i moves to the `≤ threshold` side, predicted −1 under polarity +1.
            err_pos += if y[i] > 0.0 { w[i] } else { -w[i] };
            if k + 1 < idx.len() {
                let v = data.value(i, j);
                let next = data.value(idx[k + 1] as usize, j);
                if next > v {
                    consider(v + (next - v) / 2.0, err_pos, &mut best, &mut best_err);
                }
            }
        }
    }
    // The running sums drift; recount the winner exactly so a perfect
    // split reports zero error.
    let err: f64 = (0..data.len())
        .filter(|&i| best.predict(data.row(i)) != y[i])
        .map(|i| w[i])
        .sum();
    (best, err / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::Label;

    #[test]
    fn threshold_data_needs_one_round() {
        let rows: Vec<[f64; 1]> = (0..20).map(|i| [f64::from(i)]).collect();
        let labels: Vec<Label> = (0..20)
            .map(|i| if i >= 12 { Label::Positive } else { Label::Negative })
            .collect();
        let d = Dataset::from_rows(1, &rows, &labels).unwrap();
        let m = train(&d, 5).unwrap();
        assert_eq!(m.rounds.len(), 1);
        assert_eq!(m.rounds[0].stump.threshold, 11.5);
        for (x, y) in d.rows() {
            assert_eq!(Label::from_score(m.score(x)), y);
        }
    }

    #[test]
    fn weights_stay_normalized() {
        let rows: Vec<[f64; 2]> = (0..40).map(|i| [f64::from(i % 7), f64::from(i % 5)]).collect();
        let labels: Vec<Label> = (0..40)
            .map(|i| {
                if (i % 7) + (i % 5) > 5 {
                    Label::Positive
                } else {
                    Label::Negative
                }
            })
            .collect();
        let d = Dataset::from_rows(2, &rows, &labels).unwrap();
        let (m, trace) = train_traced(&d, 20).unwrap();
        assert!(!m.rounds.is_empty());
        for s in trace.weight_sums {
            assert!((s - 1.0).abs() < 1e-12);
        }
        assert!(m.rounds.iter().all(|r| r.error < 0.5 && r.alpha >= 0.0));
    }

    #[test]
    fn zero_score_ties_negative() {
        let s = Stump {
            feature: 0,
            threshold: 0.0,
            polarity: 1,
        };
        let m = AdaBoostModel {
            rounds: vec![
                Round {
                    stump: s,
                    alpha: 0.7,
                    error: 0.2,
                },
                Round {
                    stump: Stump { polarity: -1, ..s },
                    alpha: 0.7,
                    error: 0.2,
                },
            ],
        };
        assert_eq!(Label::from_score(m.score(&[1.0])), Label::Negative);
    }

    #[test]
    fn identical_inputs_are_weak() {
        let d = Dataset::from_rows(1, &[[1.0], [1.0]], &[Label::Positive, Label::Negative]).unwrap();
        assert!(matches!(train(&d, 3), Err(Error::WeakLearner { .. })));
    }
}
