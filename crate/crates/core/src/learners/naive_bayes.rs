//! Gaussian naive Bayes evaluated in log space.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::require_both_classes;
use crate::dataset::Dataset;
use crate::error::Result;

/// Smallest admissible class-conditional variance.
pub const VARIANCE_FLOOR: f64 = 1e-9;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Index 0 is the negative class, 1 the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesModel {
    pub priors: [f64; 2],
    pub means: [Vec<f64>; 2],
    pub variances: [Vec<f64>; 2],
}

/// Fits per-class Gaussians (maximum-likelihood mean and variance).
///
/// Every variance is smoothed by `1e-9 ×` the largest per-feature variance
/// of the whole set, then floored at [`VARIANCE_FLOOR`], so a feature that is
/// constant within a class cannot produce an infinite density.
pub fn train(data: &Dataset) -> Result<NaiveBayesModel> {
    let (np, nn) = require_both_classes(data)?;
    let d = data.n_features();
    let mut sum = [vec![0.0; d], vec![0.0; d]];
    for (row, label) in data.rows() {
        let c = usize::from(label.is_positive());
        for (s, &v) in sum[c].iter_mut().zip(row) {
            *s += v;
        }
    }
    let counts = [nn as f64, np as f64];
    let means = [0, 1].map(|c| sum[c].iter().map(|s| s / counts[c]).collect::<Vec<_>>());
    let mut ss = [vec![0.0; d], vec![0.0; d]];
    for (row, label) in data.rows() {
        let c = usize::from(label.is_positive());
        for ((s, &v), &m) in ss[c].iter_mut().zip(row).zip(&means[c]) {
            *s += (v - m) * (v - m);
        }
    }

    let n = data.len() as f64;
    let mut max_var: f64 = 0.0;
    for j in 0..d {
        let m = (sum[0][j] + sum[1][j]) / n;
        // Total variance from the class decomposition.
        let within = ss[0][j] + ss[1][j];
        let (d0, d1) = (means[0][j] - m, means[1][j] - m);
        let between = counts[0] * d0 * d0 + counts[1] * d1 * d1;
        max_var = max_var.max((within + between) / n);
    }
    let smoothing = 1e-9 * max_var;
    let variances = [0, 1].map(|c| {
        ss[c]
            .iter()
            .map(|s| (s / counts[c] + smoothing).max(VARIANCE_FLOOR))
            .collect::<Vec<_>>()
    });
    Ok(NaiveBayesModel {
        priors: [counts[0] / n, counts[1] / n],
        means,
        variances,
    })
}

impl NaiveBayesModel {
    /// `ln P(C=c) + Σ_j ln p(x_j | C=c)` for both classes.
    pub fn log_joint(&self, x: &[f64]) -> [f64; 2] {
        [0, 1].map(|c| {
            let mut acc = libm::log(self.priors[c]);
            for ((&v, &m), &var) in x.iter().zip(&self.means[c]).zip(&self.variances[c]) {
                acc -= 0.5 * (LN_2PI + libm::log(var) + (v - m) * (v - m) / var);
            }
            acc
        })
    }

    /// Log posterior ratio `ln P(+1|x) − ln P(−1|x)`.
    pub fn score(&self, x: &[f64]) -> f64 {
        let [neg, pos] = self.log_joint(x);
        pos - neg
    }

    /// `[P(−1|x), P(+1|x)]`, normalized with log-sum-exp.
    pub fn posterior(&self, x: &[f64]) -> [f64; 2] {
        let lj = self.log_joint(x);
        let m = lj[0].max(lj[1]);
        let z = m + libm::log(libm::exp(lj[0] - m) + libm::exp(lj[1] - m));
        [libm::exp(lj[0] - z), libm::exp(lj[1] - z)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::preference::Label;
    use crate::rng;
    use rand_distr::{Distribution, StandardNormal};

    fn clusters(seed: u64) -> Dataset {
        let mut r = rng::seeded(seed);
        let mut d = Dataset::new(1);
        for i in 0..200 {
            let (mu, l) = if i % 2 == 0 {
                (-10.0, Label::Negative)
            } else {
                (10.0, Label::Positive)
            };
            let e: f64 = StandardNormal.sample(&mut r);
            d.push(&[mu + e], l).unwrap();
        }
        d
    }

    #[test]
    fn separated_clusters() {
        let m = train(&clusters(1)).unwrap();
        let test = clusters(2);
        let hits = test.rows().filter(|(x, y)| Label::from_score(m.score(x)) == *y).count();
        assert_eq!(hits, 200);
        assert!((m.priors[0] + m.priors[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn posterior_normalizes_at_extremes() {
        let m = train(&clusters(3)).unwrap();
        for x in [-1e6, -3.0, 0.0, 0.5, 1e6] {
            let p = m.posterior(&[x]);
            assert!(p.iter().all(|v| v.is_finite()));
            assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
            assert!(m.score(&[x]).is_finite());
        }
    }

    #[test]
    fn identical_classes_tie_negative() {
        let rows = [[1.0], [3.0], [1.0], [3.0]];
        let labels = [Label::Negative, Label::Negative, Label::Positive, Label::Positive];
        let m = train(&Dataset::from_rows(1, &rows, &labels).unwrap()).unwrap();
        assert_eq!(m.score(&[2.0]), 0.0);
        assert_eq!(Label::from_score(m.score(&[2.0])), Label::Negative);
    }

    #[test]
    fn single_class_is_degenerate() {
        let d = Dataset::from_rows(1, &[[1.0], [2.0]], &[Label::Positive; 2]).unwrap();
        assert!(matches!(train(&d), Err(Error::DegenerateClass(_))));
    }

    #[test]
    fn constant_feature_respects_floor() {
        let rows = [[0.0, 1.0], [0.0, 2.0], [0.0, 5.0], [0.0, 6.0]];
        let labels = [Label::Negative, Label::Negative, Label::Positive, Label::Positive];
        let m = train(&Dataset::from_rows(2, &rows, &labels).unwrap()).unwrap();
        assert!(m.variances.iter().flatten().all(|&v| v >= VARIANCE_FLOOR));
    }
}
