//! Regression toolkit for describing how an indicator evolves per agent.
//!
//! The typical flow averages an indicator per turn over one agent's matches,
//! optionally linearizes it with a root transform, fits lines (possibly on
//! several turn intervals) and checks whether two agents' coefficients have
//! disjoint confidence intervals.

use core::fmt;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats;
use crate::telemetry::{Indicator, MatchLog, Outcome};

/// Which of an agent's matches enter the average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    #[default]
    General,
    Victory,
    Defeat,
}

impl Subset {
    pub fn title(self) -> &'static str {
        match self {
            Subset::General => "General",
            Subset::Victory => "Victory",
            Subset::Defeat => "Defeat",
        }
    }

    fn admits(self, log: &MatchLog) -> bool {
        match self {
            Subset::General => true,
            Subset::Victory => log.outcome() == Some(Outcome::Victory),
            Subset::Defeat => log.outcome() == Some(Outcome::Defeat),
        }
    }
}

impl core::str::FromStr for Subset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "general" => Ok(Subset::General),
            "victory" => Ok(Subset::Victory),
            "defeat" => Ok(Subset::Defeat),
            _ => Err(Error::Domain(format!("unknown subset `{s}`"))),
        }
    }
}

/// Two-sided confidence level of coefficient intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Confidence {
    #[serde(rename = "0.90")]
    P90,
    #[serde(rename = "0.95")]
    P95,
    #[serde(rename = "0.99")]
    P99,
}

impl Confidence {
    pub fn value(self) -> f64 {
        match self {
            Confidence::P90 => 0.90,
            Confidence::P95 => 0.95,
            Confidence::P99 => 0.99,
        }
    }

    pub fn from_value(v: f64) -> Result<Self> {
        [Confidence::P90, Confidence::P95, Confidence::P99]
            .into_iter()
            .find(|c| (c.value() - v).abs() < 1e-9)
            .ok_or_else(|| Error::Domain(format!("confidence {v} is not one of 0.90, 0.95, 0.99")))
    }
}

impl fmt::Display for Confidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}%", libm::round(self.value() * 100.0))
    }
}

/// Mean of `indicator` at each turn over the selected matches, for the
/// turns every selected match reached.
pub fn average_by_turn(logs: &[&MatchLog], indicator: Indicator, subset: Subset) -> Result<Vec<f64>> {
    let selected: Vec<&MatchLog> = logs.iter().copied().filter(|l| subset.admits(l)).collect();
    let first = selected
        .first()
        .ok_or_else(|| Error::Selection(format!("no {} matches to average", subset.title())))?;
    if let Some(other) = selected.iter().find(|l| l.agent_id() != first.agent_id()) {
        return Err(Error::Selection(format!(
            "matches of `{}` and `{}` mixed in one average",
            first.agent_id(),
            other.agent_id()
        )));
    }
    let len = selected.iter().map(|l| l.len()).min().unwrap_or(0);
    let n = selected.len() as f64;
    Ok((0..len)
        .map(|i| selected.iter().map(|l| l.turns()[i].get(indicator)).sum::<f64>() / n)
        .collect())
}

/// Element-wise `k`-th root.
pub fn transform_root(series: &[f64], k: u32) -> Result<Vec<f64>> {
    if k < 2 {
        return Err(Error::Domain(format!("root order {k} must be at least 2")));
    }
    let kf = f64::from(k);
    series
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v < 0.0 || v.is_nan() {
                return Err(Error::NegativeValue { index: i, value: v });
            }
            if v == 0.0 {
                return Ok(0.0);
            }
            let mut r = libm::pow(v, 1.0 / kf);
            // One Newton step polishes the last bits (e.g. 32^(1/5) → 2 exactly).
            let rk1 = libm::pow(r, kf - 1.0);
            r -= (rk1 * r - v) / (kf * rk1);
            Ok(r)
        })
        .collect()
}

/// Least-squares line `y = b0 + b1·x` with Student-t intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub b0: f64,
    pub b1: f64,
    pub r_squared: f64,
    /// Half-widths of the intervals at `confidence`.
    pub ci_b0: f64,
    pub ci_b1: f64,
    pub se_b0: f64,
    pub se_b1: f64,
    pub n: usize,
    pub residual_variance: f64,
    pub confidence: Confidence,
    /// First and last x of the fitted range.
    pub x_range: (f64, f64),
}

impl RegressionFit {
    pub fn estimate(&self, c: Coefficient) -> f64 {
        match c {
            Coefficient::B0 => self.b0,
            Coefficient::B1 => self.b1,
        }
    }

    pub fn half_width(&self, c: Coefficient) -> f64 {
        match c {
            Coefficient::B0 => self.ci_b0,
            Coefficient::B1 => self.ci_b1,
        }
    }

    pub fn std_error(&self, c: Coefficient) -> f64 {
        match c {
            Coefficient::B0 => self.se_b0,
            Coefficient::B1 => self.se_b1,
        }
    }

    pub fn interval(&self, c: Coefficient) -> (f64, f64) {
        let (e, h) = (self.estimate(c), self.half_width(c));
        (e - h, e + h)
    }
}

pub fn ols_fit(x: &[f64], y: &[f64], confidence: Confidence) -> Result<RegressionFit> {
    if x.len() != y.len() {
        return Err(Error::Contract(format!(
            "{} x values but {} y values",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::SampleSize { found: n, required: 3 });
    }
    let nf = n as f64;
    let mx = stats::mean(x);
    let my = stats::mean(y);
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return Err(Error::Rank);
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b1 = sxy / sxx;
    let b0 = my - b1 * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - b0 - b1 * a;
            r * r
        })
        .sum();
    let sst: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let r_squared = if sst > 0.0 {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let s2 = sse / (nf - 2.0);
    let se_b1 = libm::sqrt(s2 / sxx);
    let se_b0 = libm::sqrt(s2 * (1.0 / nf + mx * mx / sxx));
    let t = stats::t_critical(confidence.value(), nf - 2.0);
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    Ok(RegressionFit {
        b0,
        b1,
        r_squared,
        ci_b0: t * se_b0,
        ci_b1: t * se_b1,
        se_b0,
        se_b1,
        n,
        residual_variance: s2,
        confidence,
        x_range: (lo, hi),
    })
}

/// Independent fits on `x ≤ breakpoint` and `x > breakpoint`.
pub fn segment_fit(
    x: &[f64],
    y: &[f64],
    breakpoint: f64,
    confidence: Confidence,
) -> Result<(RegressionFit, RegressionFit)> {
    let mut fits = multi_segment_fit(x, y, &[breakpoint], confidence)?;
    let second = fits.pop().ok_or(Error::Rank)?;
    let first = fits.pop().ok_or(Error::Rank)?;
    Ok((first, second))
}

/// One fit per interval delimited by the ascending `breakpoints`; each
/// breakpoint belongs to the interval on its left.
pub fn multi_segment_fit(
    x: &[f64],
    y: &[f64],
    breakpoints: &[f64],
    confidence: Confidence,
) -> Result<Vec<RegressionFit>> {
    if x.len() != y.len() {
        return Err(Error::Contract(format!(
            "{} x values but {} y values",
            x.len(),
            y.len()
        )));
    }
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain(String::from("breakpoints must be strictly increasing")));
    }
    let mut fits = Vec::with_capacity(breakpoints.len() + 1);
    for s in 0..=breakpoints.len() {
        let lo = if s == 0 { f64::NEG_INFINITY } else { breakpoints[s - 1] };
        let hi = breakpoints.get(s).copied().unwrap_or(f64::INFINITY);
        let (xs, ys): (Vec<f64>, Vec<f64>) = x
            .iter()
            .zip(y)
            .filter(|(a, _)| **a > lo && **a <= hi)
            .map(|(a, b)| (*a, *b))
            .unzip();
        fits.push(ols_fit(&xs, &ys, confidence)?);
    }
    Ok(fits)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coefficient {
    B0,
    B1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Separated,
    Overlapping,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub coefficient: Coefficient,
    pub verdict: Verdict,
    pub confidence: Confidence,
    /// `(b_a − b_b) / √(se_a² + se_b²)`, reported alongside the verdict.
    pub t_statistic: f64,
    pub interval_a: (f64, f64),
    pub interval_b: (f64, f64),
}

/// Separated exactly when the two coefficient intervals are disjoint.
pub fn separation_test(
    a: &RegressionFit,
    b: &RegressionFit,
    coefficient: Coefficient,
    confidence: Confidence,
) -> Result<Separation> {
    if a.confidence != confidence || b.confidence != confidence {
        return Err(Error::Contract(format!(
            "fits at {} and {} compared at {confidence}",
            a.confidence, b.confidence
        )));
    }
    let ia = a.interval(coefficient);
    let ib = b.interval(coefficient);
    let disjoint = ia.1 < ib.0 || ib.1 < ia.0;
    let (sa, sb) = (a.std_error(coefficient), b.std_error(coefficient));
    let diff = a.estimate(coefficient) - b.estimate(coefficient);
    let se = libm::sqrt(sa * sa + sb * sb);
    let t_statistic = if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    Ok(Separation {
        coefficient,
        verdict: if disjoint {
            Verdict::Separated
        } else {
            Verdict::Overlapping
        },
        confidence,
        t_statistic,
        interval_a: ia,
        interval_b: ib,
    })
}

/// Paired two-sided t-test on per-item differences `a_i − b_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: f64,
    pub p_value: f64,
    pub significant: bool,
}

pub fn paired_t_test(a: &[f64], b: &[f64], confidence: Confidence) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::Contract(format!("{} vs {} paired values", a.len(), b.len())));
    }
    if a.len() < 2 {
        return Err(Error::SampleSize {
            found: a.len(),
            required: 2,
        });
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = d.len() as f64;
    let m = stats::mean(&d);
    let var = d.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1.0);
    let df = n - 1.0;
    let (t, p_value) = if var > 0.0 {
        let t = m / libm::sqrt(var / n);
        (t, 2.0 * (1.0 - stats::t_cdf(t.abs(), df)))
    } else if m == 0.0 {
        (0.0, 1.0)
    } else {
        (m.signum() * f64::INFINITY, 0.0)
    };
    Ok(TTest {
        t,
        df,
        p_value,
        significant: p_value < 1.0 - confidence.value(),
    })
}

/// Fits of one agent over consecutive turn intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentFits {
    pub agent: String,
    pub matches: usize,
    pub fits: Vec<RegressionFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationReport {
    pub indicator: Indicator,
    /// Root order applied after averaging, if any.
    pub transform: Option<u32>,
    pub subset: Subset,
    pub confidence: Confidence,
    /// Inclusive turn ranges, one per fitted interval.
    pub intervals: Vec<(u32, u32)>,
    pub agents: [AgentFits; 2],
    /// Per interval: separation of b0 then b1.
    pub separation: Vec<[Separation; 2]>,
}

/// Averaged (and optionally root-transformed) series of one agent with its
/// interval fits.
pub fn characterize_agent(
    logs: &[&MatchLog],
    indicator: Indicator,
    transform: Option<u32>,
    breakpoints: &[u32],
    subset: Subset,
    confidence: Confidence,
) -> Result<AgentFits> {
    let mut y = average_by_turn(logs, indicator, subset)?;
    if let Some(k) = transform {
        y = transform_root(&y, k)?;
    }
    let x: Vec<f64> = (1..=y.len()).map(|t| t as f64).collect();
    let bps: Vec<f64> = breakpoints.iter().map(|&b| f64::from(b)).collect();
    let fits = multi_segment_fit(&x, &y, &bps, confidence)?;
    let agent = logs
        .iter()
        .find(|l| subset.admits(l))
        .map(|l| String::from(l.agent_id()))
        .unwrap_or_default();
    Ok(AgentFits {
        agent,
        matches: logs.iter().filter(|l| subset.admits(l)).count(),
        fits,
    })
}

/// Fits both agents on the same intervals and tests every coefficient.
pub fn compare_agents(
    logs_a: &[&MatchLog],
    logs_b: &[&MatchLog],
    indicator: Indicator,
    transform: Option<u32>,
    breakpoints: &[u32],
    subset: Subset,
    confidence: Confidence,
) -> Result<CharacterizationReport> {
    let a = characterize_agent(logs_a, indicator, transform, breakpoints, subset, confidence)?;
    let b = characterize_agent(logs_b, indicator, transform, breakpoints, subset, confidence)?;
    let mut separation = Vec::new();
    for (fa, fb) in a.fits.iter().zip(&b.fits) {
        separation.push([
            separation_test(fa, fb, Coefficient::B0, confidence)?,
            separation_test(fa, fb, Coefficient::B1, confidence)?,
        ]);
    }
    let last = a
        .fits
        .last()
        .map_or(0, |f| f.x_range.1 as u32)
        .min(b.fits.last().map_or(0, |f| f.x_range.1 as u32));
    let mut intervals = Vec::new();
    let mut start = 1;
    for &bp in breakpoints {
        intervals.push((start, bp));
        start = bp + 1;
    }
    intervals.push((start, last));
    Ok(CharacterizationReport {
        indicator,
        transform,
        subset,
        confidence,
        intervals,
        agents: [a, b],
        separation,
    })
}
