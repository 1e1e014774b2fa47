//! Rule induction with incremental reduced-error pruning.
//!
//! Rules are learned for the positive class one at a time. Each rule is
//! grown on two thirds of the uncovered data by greedily adding the
//! condition with the best FOIL gain, then pruned back on the remaining
//! third. Induction stops when a pruned rule is wrong on at least half of
//! the prune examples it covers. Anything no rule covers is negative.

use core::fmt;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::Result;
use crate::rng;

/// Features with at most this many distinct values also get `=` conditions.
pub const MAX_EQ_VALUES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Op {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl Op {
    pub fn symbol(self) -> &'static str {
        match self {
            Op::Le => "<=",
            Op::Ge => ">=",
            Op::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub feature: usize,
    pub name: String,
    pub op: Op,
    pub value: f64,
}

impl Condition {
    #[inline]
    pub fn holds(&self, x: &[f64]) -> bool {
        let v = x[self.feature];
        match self.op {
            Op::Le => v <= self.value,
            Op::Ge => v >= self.value,
            Op::Eq => v == self.value,
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.name, self.op.symbol(), self.value)
    }
}

/// Conjunction of conditions predicting the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    /// Training examples covered when the rule was added.
    pub covered: usize,
    /// Negatives among them.
    pub errors: usize,
}

impl Rule {
    pub fn covers(&self, x: &[f64]) -> bool {
        self.conditions.iter().all(|c| c.holds(x))
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn classify(&self, x: &[f64]) -> bool {
        self.rules.iter().any(|r| r.covers(x))
    }

    /// `+1` when some rule fires, `−1` otherwise.
    pub fn score(&self, x: &[f64]) -> f64 {
        if self.classify(x) {
            1.0
        } else {
            -1.0
        }
    }

    /// One rule per line: `cond ∧ cond → class (covered/errors)`, followed
    /// by the default rule.
    pub fn render(&self, class: &str) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let conds: Vec<String> = r.conditions.iter().map(|c| format!("{c}")).collect();
            out.push_str(&format!(
                "{} → {} ({}/{})\n",
                conds.join(" ∧ "),
                class,
                r.covered,
                r.errors
            ));
        }
        out.push_str("otherwise → no preference\n");
        out
    }
}

/// Learns a rule set for the positive class. Needs no particular class
/// balance: data without positives yields an empty rule set.
pub fn train(data: &Dataset, seed: u64) -> Result<RuleSet> {
    let n = data.len();
    let d = data.n_features();
    let order: Vec<Vec<u32>> = (0..d)
        .map(|j| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| data.value(a as usize, j).total_cmp(&data.value(b as usize, j)));
            idx
        })
        .collect();
    let eq_ok: Vec<bool> = (0..d)
        .map(|j| distinct_at_most(data, &order[j], j, MAX_EQ_VALUES))
        .collect();
    let ctx = Ctx {
        data,
        order: &order,
        eq_ok: &eq_ok,
    };

    let mut remaining: Vec<usize> = (0..n).collect();
    let mut rules = Vec::new();
    let mut r = rng::seeded(seed);
    loop {
        let mut pos: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| data.label(i).is_positive())
            .collect();
        if pos.is_empty() {
            break;
        }
        let mut neg: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| !data.label(i).is_positive())
            .collect();
        rng::shuffle(&mut pos, &mut r);
        rng::shuffle(&mut neg, &mut r);
        let cut = |len: usize| (len * 2).div_ceil(3);
        let (gp, pp) = pos.split_at(cut(pos.len()));
        let (gn, pn) = neg.split_at(cut(neg.len()));
        let mut grow: Vec<usize> = gp.iter().chain(gn).copied().collect();
        grow.sort_unstable();
        let prune: Vec<usize> = pp.iter().chain(pn).copied().collect();

        let conditions = ctx.grow(&grow);
        if conditions.is_empty() {
            break;
        }
        let conditions = prune_rule(data, conditions, &prune);
        let (p, nn) = coverage(data, &conditions, &prune);
        if p + nn == 0 || 2 * nn >= p + nn {
            break;
        }
        let rule_covers = |i: usize| conditions.iter().all(|c| c.holds(data.row(i)));
        let covered: Vec<usize> = remaining.iter().copied().filter(|&i| rule_covers(i)).collect();
        let errors = covered.iter().filter(|&&i| !data.label(i).is_positive()).count();
        remaining.retain(|&i| !rule_covers(i));
        rules.push(Rule {
            conditions,
            covered: covered.len(),
            errors,
        });
    }
    Ok(RuleSet { rules })
}

fn distinct_at_most(data: &Dataset, order: &[u32], j: usize, limit: usize) -> bool {
    let mut count = 0;
    let mut last = f64::NAN;
    for &i in order {
        let v = data.value(i as usize, j);
        if v != last {
            count += 1;
            if count > limit {
                return false;
            }
            last = v;
        }
    }
    true
}

/// `(positives, negatives)` among `rows` covered by the conjunction.
fn coverage(data: &Dataset, conditions: &[Condition], rows: &[usize]) -> (usize, usize) {
    let mut p = 0;
    let mut n = 0;
    for &i in rows {
        if conditions.iter().all(|c| c.holds(data.row(i))) {
            if data.label(i).is_positive() {
                p += 1;
            } else {
                n += 1;
            }
        }
    }
    (p, n)
}

/// Keeps the prefix (at least one condition) maximizing `(p−n)/(p+n)` on the
/// prune set; the shortest prefix wins ties.
fn prune_rule(data: &Dataset, conditions: Vec<Condition>, prune: &[usize]) -> Vec<Condition> {
    let mut best_len = 1;
    let mut best_val = f64::NEG_INFINITY;
    for len in 1..=conditions.len() {
        let (p, n) = coverage(data, &conditions[..len], prune);
        let val = if p + n == 0 {
            -1.0
        } else {
            (p as f64 - n as f64) / (p + n) as f64
        };
        if val > best_val {
            best_val = val;
            best_len = len;
        }
    }
    let mut conditions = conditions;
    conditions.truncate(best_len);
    conditions
}

fn foil_gain(p0: f64, n0: f64, p1: f64, n1: f64) -> f64 {
    if p1 <= 0.0 {
        return f64::NEG_INFINITY;
    }
    p1 * (libm::log2(p1 / (p1 + n1)) - libm::log2(p0 / (p0 + n0)))
}

struct Ctx<'a> {
    data: &'a Dataset,
    order: &'a [Vec<u32>],
    eq_ok: &'a [bool],
}

impl Ctx<'_> {
    /// Greedy growth until no negatives are covered or no condition has
    /// positive gain.
    fn grow(&self, grow: &[usize]) -> Vec<Condition> {
        let data = self.data;
        let mut covered: Vec<usize> = grow.to_vec();
        let mut mask = alloc::vec![false; data.len()];
        let mut conditions: Vec<Condition> = Vec::new();
        loop {
            let p0 = covered.iter().filter(|&&i| data.label(i).is_positive()).count();
            let n0 = covered.len() - p0;
            if n0 == 0 || p0 == 0 {
                break;
            }
            for &i in &covered {
                mask[i] = true;
            }
            let best = self.best_condition(&covered, &mask, p0, n0);
            for &i in &covered {
                mask[i] = false;
            }
            match best {
                Some(c) => {
                    covered.retain(|&i| c.holds(data.row(i)));
                    conditions.push(c);
                }
                None => break,
            }
        }
        conditions
    }

    /// Scans each feature's covered values in ascending order; ties go to
    /// the earliest (feature, operator, value).
    fn best_condition(&self, covered: &[usize], mask: &[bool], p0: usize, n0: usize) -> Option<Condition> {
        let data = self.data;
        let (fp0, fn0) = (p0 as f64, n0 as f64);
        let mut best: Option<(f64, usize, Op, f64)> = None;
        let mut sorted: Vec<(f64, bool)> = Vec::with_capacity(covered.len());
        // Filtering the presorted order is cheaper than sorting unless the
        // covered set is a small fraction of the data.
        let use_presort = covered.len() * 16 > data.len();
        for j in 0..data.n_features() {
            sorted.clear();
            if use_presort {
                sorted.extend(
                    self.order[j]
                        .iter()
                        .map(|&i| i as usize)
                        .filter(|&i| mask[i])
                        .map(|i| (data.value(i, j), data.label(i).is_positive())),
                );
            } else {
                sorted.extend(covered.iter().map(|&i| (data.value(i, j), data.label(i).is_positive())));
                sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
            }
            // Group runs of equal values: (value, positives, negatives).
            let mut groups: Vec<(f64, usize, usize)> = Vec::new();
            for &(v, pos) in &sorted {
                match groups.last_mut() {
                    Some(g) if g.0 == v => {
                        if pos {
                            g.1 += 1
                        } else {
                            g.2 += 1
                        }
                    }
                    _ => groups.push((v, usize::from(pos), usize::from(!pos))),
                }
            }
            if groups.len() < 2 {
                continue;
            }
            let mut consider = |gain: f64, op: Op, value: f64| {
                if gain > 0.0 && best.is_none_or(|b| gain > b.0) {
                    best = Some((gain, j, op, value));
                }
            };
            // x <= v: prefix sums.
            let (mut pp, mut nn) = (0usize, 0usize);
            for g in &groups[..groups.len() - 1] {
                pp += g.1;
                nn += g.2;
                consider(foil_gain(fp0, fn0, pp as f64, nn as f64), Op::Le, g.0);
            }
            // x >= v: suffix sums.
            let (mut pp, mut nn) = (0usize, 0usize);
            let mut ge: Vec<(f64, f64)> = Vec::with_capacity(groups.len());
            for g in groups[1..].iter().rev() {
                pp += g.1;
                nn += g.2;
                ge.push((foil_gain(fp0, fn0, pp as f64, nn as f64), g.0));
            }
            for &(gain, v) in ge.iter().rev() {
                consider(gain, Op::Ge, v);
            }
            if self.eq_ok[j] {
                for g in &groups {
                    consider(foil_gain(fp0, fn0, g.1 as f64, g.2 as f64), Op::Eq, g.0);
                }
            }
        }
        best.map(|(_, feature, op, value)| Condition {
            feature,
            name: data.names()[feature].clone(),
            op,
            value,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::Label;

    #[test]
    fn all_negative_gives_empty_rules() {
        let d = Dataset::from_rows(1, &[[1.0], [2.0], [3.0]], &[Label::Negative; 3]).unwrap();
        let rs = train(&d, 0).unwrap();
        assert!(rs.rules.is_empty());
        assert_eq!(rs.score(&[2.0]), -1.0);
    }

    #[test]
    fn learns_simple_threshold() {
        let rows: Vec<[f64; 2]> = (0..90).map(|i| [f64::from(i % 30), f64::from(i % 2)]).collect();
        let labels: Vec<Label> = rows
            .iter()
            .map(|r| if r[0] > 20.0 { Label::Positive } else { Label::Negative })
            .collect();
        let d = Dataset::from_rows(2, &rows, &labels).unwrap();
        let rs = train(&d, 5).unwrap();
        for (x, y) in d.rows() {
            assert_eq!(rs.classify(x), y.is_positive());
        }
        let text = rs.render("Culture");
        assert!(text.starts_with("x0 >= 21 → Culture ("), "{text}");
    }

    #[test]
    fn foil_gain_prefers_purity() {
        assert!(foil_gain(10.0, 10.0, 8.0, 0.0) > foil_gain(10.0, 10.0, 8.0, 4.0));
        assert_eq!(foil_gain(10.0, 10.0, 0.0, 3.0), f64::NEG_INFINITY);
    }
}
