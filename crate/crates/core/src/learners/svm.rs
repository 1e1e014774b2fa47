//! Binary C-SVM with an RBF kernel, trained by sequential minimal
//! optimization with second-order working-set selection.
//!
//! Inputs are mapped to `[−1, 1]` with the training min/max before anything
//! else; the same map is stored with the model and applied at predict time.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::require_both_classes;
use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Stopping tolerance on the maximal KKT violation.
pub const TOLERANCE: f64 = 1e-3;

/// Iteration budget per training example.
pub const PASSES: usize = 100;

/// Kernel rows kept in memory at once.
const CACHE_ROWS: usize = 512;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub cost: f64,
    /// `None` means `1 / n_features`.
    pub gamma: Option<f64>,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { cost: 1.0, gamma: None }
    }
}

impl SvmParams {
    pub fn new(cost: f64, gamma: f64) -> Self {
        SvmParams {
            cost,
            gamma: Some(gamma),
        }
    }

    /// `2^c_exp`, `2^g_exp`.
    pub fn from_exponents(c_exp: i32, g_exp: i32) -> Self {
        Self::new(libm::exp2(f64::from(c_exp)), libm::exp2(f64::from(g_exp)))
    }
}

/// Affine map of each feature onto `[−1, 1]`; constant features go to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaler {
    pub fn fit(data: &Dataset) -> Self {
        let d = data.n_features();
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for (row, _) in data.rows() {
            for j in 0..d {
                min[j] = min[j].min(row[j]);
                max[j] = max[j].max(row[j]);
            }
        }
        Scaler { min, max }
    }

    pub fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(x.iter().enumerate().map(|(j, &v)| {
            let (lo, hi) = (self.min[j], self.max[j]);
            if hi > lo {
                -1.0 + 2.0 * (v - lo) / (hi - lo)
            } else {
                0.0
            }
        }));
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub cost: f64,
    pub gamma: f64,
    pub scaler: Scaler,
    /// Scaled support vectors.
    pub support: Vec<Vec<f64>>,
    /// `α_i · y_i` for each support vector.
    pub coef: Vec<f64>,
    pub bias: f64,
}

impl SvmModel {
    /// `Σ α_i y_i K(x_i, x) + b`.
    pub fn decision(&self, x: &[f64]) -> f64 {
        let mut z = Vec::with_capacity(x.len());
        self.scaler.apply(x, &mut z);
        self.decision_scaled(&z)
    }

    fn decision_scaled(&self, z: &[f64]) -> f64 {
        self.support
            .iter()
            .zip(&self.coef)
            .map(|(sv, &c)| c * rbf(self.gamma, sv, z))
            .sum::<f64>()
            + self.bias
    }
}

/// Dual solution and convergence diagnostics of one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// `α_i` for every training example, in input order.
    pub alphas: Vec<f64>,
    pub labels: Vec<f64>,
    /// Per-example violation of the KKT conditions of the final model.
    pub kkt_residuals: Vec<f64>,
    pub iterations: usize,
    /// Maximal violating-pair gap at termination.
    pub gap: f64,
}

impl Diagnostics {
    pub fn dual_sum(&self) -> f64 {
        self.alphas.iter().zip(&self.labels).map(|(a, y)| a * y).sum()
    }

    pub fn max_kkt_residual(&self) -> f64 {
        self.kkt_residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[inline]
fn rbf(gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    libm::exp(-gamma * d2)
}

pub fn train(data: &Dataset, params: &SvmParams) -> Result<SvmModel> {
    train_detailed(data, params).map(|(m, _)| m)
}

pub fn train_detailed(data: &Dataset, params: &SvmParams) -> Result<(SvmModel, Diagnostics)> {
    require_both_classes(data)?;
    let gamma = params.gamma.unwrap_or(1.0 / data.n_features().max(1) as f64);
    if !(params.cost > 0.0 && params.cost.is_finite()) || !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!(
            "SVM needs C > 0 and γ > 0, got C = {}, γ = {gamma}",
            params.cost
        )));
    }
    let scaler = Scaler::fit(data);
    let mut buf = Vec::new();
    let xs: Vec<Vec<f64>> = (0..data.len())
        .map(|i| {
            scaler.apply(data.row(i), &mut buf);
            buf.clone()
        })
        .collect();
    let y: Vec<f64> = data.labels().iter().map(|l| l.sign()).collect();
    let mut solver = Solver::new(&xs, &y, params.cost, gamma);
    let max_iter = PASSES.saturating_mul(xs.len()).max(10_000);
    let (iterations, gap) = solver.solve(max_iter)?;
    let bias = -solver.rho();

    let mut support = Vec::new();
    let mut coef = Vec::new();
    for i in 0..xs.len() {
        if solver.alpha[i] > 0.0 {
            support.push(xs[i].clone());
            coef.push(solver.alpha[i] * y[i]);
        }
    }
    let model = SvmModel {
        cost: params.cost,
        gamma,
        scaler,
        support,
        coef,
        bias,
    };
    let c = params.cost;
    let kkt_residuals = (0..xs.len())
        .map(|i| {
            let m = y[i] * model.decision_scaled(&xs[i]);
            let a = solver.alpha[i];
            if a <= 0.0 {
                (1.0 - m).max(0.0)
            } else if a >= c {
                (m - 1.0).max(0.0)
            } else {
                (m - 1.0).abs()
            }
        })
        .collect();
    let diag = Diagnostics {
        alphas: solver.alpha.clone(),
        labels: y,
        kkt_residuals,
        iterations,
        gap,
    };
    Ok((model, diag))
}

struct Solver<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    c: f64,
    gamma: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
    cache: Vec<Option<Rc<[f64]>>>,
    cached: VecDeque<usize>,
}

/// Working pair `(i, j)` with their kernel rows.
type WorkingSet = (usize, usize, Rc<[f64]>, Rc<[f64]>);

impl<'a> Solver<'a> {
    fn new(x: &'a [Vec<f64>], y: &'a [f64], c: f64, gamma: f64) -> Self {
        let n = x.len();
        Solver {
            x,
            y,
            c,
            gamma,
            alpha: vec![0.0; n],
            grad: vec![-1.0; n],
            cache: vec![None; n],
            cached: VecDeque::new(),
        }
    }

    /// Row `i` of `Q_ij = y_i y_j K(x_i, x_j)`.
    fn q_row(&mut self, i: usize) -> Rc<[f64]> {
        if let Some(row) = &self.cache[i] {
            return Rc::clone(row);
        }
        let row: Rc<[f64]> = (0..self.x.len())
            .map(|j| self.y[i] * self.y[j] * rbf(self.gamma, &self.x[i], &self.x[j]))
            .collect();
        if self.cached.len() >= CACHE_ROWS {
            if let Some(old) = self.cached.pop_front() {
                self.cache[old] = None;
            }
        }
        self.cache[i] = Some(Rc::clone(&row));
        self.cached.push_back(i);
        row
    }

    fn is_upper(&self, t: usize) -> bool {
        self.alpha[t] >= self.c
    }

    fn is_lower(&self, t: usize) -> bool {
        self.alpha[t] <= 0.0
    }

    /// Second-order working-set selection. Returns `None` once the
    /// maximal violation falls below the tolerance, with the gap.
    fn select(&mut self) -> (Option<WorkingSet>, f64) {
        let n = self.x.len();
        let mut gmax = f64::NEG_INFINITY;
        let mut gmax_idx = None;
        for t in 0..n {
            if self.y[t] > 0.0 {
                if !self.is_upper(t) && -self.grad[t] >= gmax {
                    gmax = -self.grad[t];
                    gmax_idx = Some(t);
                }
            } else if !self.is_lower(t) && self.grad[t] >= gmax {
                gmax = self.grad[t];
                gmax_idx = Some(t);
            }
        }
        let Some(i) = gmax_idx else {
            return (None, 0.0);
        };
        let qi = self.q_row(i);
        let mut gmax2 = f64::NEG_INFINITY;
        let mut gmin_idx = None;
        let mut obj_min = f64::INFINITY;
        for j in 0..n {
            let (grad_diff, quad) = if self.y[j] > 0.0 {
                if self.is_lower(j) {
                    continue;
                }
                gmax2 = gmax2.max(self.grad[j]);
                (gmax + self.grad[j], 2.0 - 2.0 * self.y[i] * qi[j])
            } else {
                if self.is_upper(j) {
                    continue;
                }
                gmax2 = gmax2.max(-self.grad[j]);
                (gmax - self.grad[j], 2.0 + 2.0 * self.y[i] * qi[j])
            };
            if grad_diff > 0.0 {
                let quad = if quad > 0.0 { quad } else { TAU };
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= obj_min {
                    obj_min = obj;
                    gmin_idx = Some(j);
                }
            }
        }
        let gap = gmax + gmax2;
        match gmin_idx {
            Some(j) if gap >= TOLERANCE => {
                let qj = self.q_row(j);
                (Some((i, j, qi, qj)), gap)
            }
            _ => (None, gap.max(0.0)),
        }
    }

    fn solve(&mut self, max_iter: usize) -> Result<(usize, f64)> {
        let c = self.c;
        let mut iter = 0;
        loop {
            let (sel, gap) = self.select();
            let Some((i, j, qi, qj)) = sel else {
                return Ok((iter, gap));
            };
            if iter >= max_iter {
                return Err(Error::Convergence {
                    iterations: iter,
                    residual: gap,
                });
            }
            iter += 1;
            let (old_ai, old_aj) = (self.alpha[i], self.alpha[j]);
            // K(x, x) = 1 for the RBF kernel.
            if self.y[i] != self.y[j] {
                let quad = (2.0 + 2.0 * qi[j]).max(TAU);
                let delta = (-self.grad[i] - self.grad[j]) / quad;
                let diff = self.alpha[i] - self.alpha[j];
                self.alpha[i] += delta;
                self.alpha[j] += delta;
                if diff > 0.0 {
                    if self.alpha[j] < 0.0 {
                        self.alpha[j] = 0.0;
                        self.alpha[i] = diff;
                    }
                } else if self.alpha[i] < 0.0 {
                    self.alpha[i] = 0.0;
                    self.alpha[j] = -diff;
                }
                if diff > 0.0 {
                    if self.alpha[i] > c {
                        self.alpha[i] = c;
                        self.alpha[j] = c - diff;
                    }
                } else if self.alpha[j] > c {
                    self.alpha[j] = c;
                    self.alpha[i] = c + diff;
                }
            } else {
                let quad = (2.0 - 2.0 * qi[j]).max(TAU);
                let delta = (self.grad[i] - self.grad[j]) / quad;
                let sum = self.alpha[i] + self.alpha[j];
                self.alpha[i] -= delta;
                self.alpha[j] += delta;
                if sum > c {
                    if self.alpha[i] > c {
                        self.alpha[i] = c;
                        self.alpha[j] = sum - c;
                    }
                } else if self.alpha[j] < 0.0 {
                    self.alpha[j] = 0.0;
                    self.alpha[i] = sum;
                }
                if sum > c {
                    if self.alpha[j] > c {
                        self.alpha[j] = c;
                        self.alpha[i] = sum - c;
                    }
                } else if self.alpha[i] < 0.0 {
                    self.alpha[i] = 0.0;
                    self.alpha[j] = sum;
                }
            }
            let (dai, daj) = (self.alpha[i] - old_ai, self.alpha[j] - old_aj);
            for k in 0..self.grad.len() {
                self.grad[k] += qi[k] * dai + qj[k] * daj;
            }
        }
    }

    /// Offset `ρ` with decision `Σ α y K − ρ`: the mean of `y_i ∇_i` over free
    /// variables, or the midpoint of the feasible interval when none are free.
    fn rho(&self) -> f64 {
        let mut ub = f64::INFINITY;
        let mut lb = f64::NEG_INFINITY;
        let mut sum_free = 0.0;
        let mut n_free = 0usize;
        for i in 0..self.x.len() {
            let yg = self.y[i] * self.grad[i];
            if self.is_upper(i) {
                if self.y[i] < 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else if self.is_lower(i) {
                if self.y[i] > 0.0 {
                    ub = ub.min(yg);
                } else {
                    lb = lb.max(yg);
                }
            } else {
                n_free += 1;
                sum_free += yg;
            }
        }
        if n_free > 0 {
            sum_free / n_free as f64
        } else {
            (ub + lb) / 2.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::Label;

    fn separable() -> Dataset {
        let mut d = Dataset::new(2);
        for i in 0..20 {
            let t = f64::from(i) / 19.0;
            d.push(&[t, 0.8 + t * 0.1], Label::Positive).unwrap();
            d.push(&[t, -0.8 - t * 0.1], Label::Negative).unwrap();
        }
        d
    }

    #[test]
    fn separable_data_fits_exactly() {
        let d = separable();
        let (m, diag) = train_detailed(&d, &SvmParams::new(100.0, 0.5)).unwrap();
        for (x, y) in d.rows() {
            assert_eq!(Label::from_score(m.decision(x)), y);
        }
        assert!(diag.max_kkt_residual() < TOLERANCE);
        assert!(diag.dual_sum().abs() < 1e-8);
        assert!(diag.alphas.iter().all(|&a| (0.0..=100.0).contains(&a)));
    }

    #[test]
    fn constant_feature_scales_to_zero() {
        let mut d = Dataset::new(2);
        d.push(&[3.0, 0.0], Label::Positive).unwrap();
        d.push(&[3.0, 1.0], Label::Negative).unwrap();
        let s = Scaler::fit(&d);
        let mut out = Vec::new();
        s.apply(&[3.0, 0.5], &mut out);
        assert_eq!(out, [0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            train(&separable(), &SvmParams::new(0.0, 1.0)),
            Err(Error::Domain(_))
        ));
    }
}
