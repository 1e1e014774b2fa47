//! Feature matrices, reports and tables on disk.

use std::fs;
use std::path::Path;

use prefmodel_core::characterize::{CharacterizationReport, Coefficient};
use prefmodel_core::dataset::Corpus;
use prefmodel_core::evaluation::EvalReport;
use prefmodel_core::learners::LearnerKind;
use prefmodel_core::tuning::GridOutcome;
use prefmodel_core::{Dataset, Label, Preference};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(Error::json(path))?;
    fs::write(path, text + "\n").map_err(Error::io(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(Error::io(path))?;
    serde_json::from_str(&text).map_err(Error::json(path))
}

const TRAILER: [&str; 3] = ["label", "match_id", "turn"];

/// One instance per row: registry columns, then `label,match_id,turn`.
pub fn write_features(path: &Path, corpus: &Corpus, target: Preference) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(Error::csv(path))?;
    let mut header: Vec<&str> = corpus.names().iter().map(String::as_str).collect();
    header.extend(TRAILER);
    w.write_record(&header).map_err(Error::csv(path))?;
    let d = corpus.names().len();
    let mut row: Vec<String> = Vec::with_capacity(d + 3);
    for b in corpus.blocks() {
        let label = b.preference.label(target).as_i8().to_string();
        for (i, turn) in b.turns.iter().enumerate() {
            row.clear();
            row.extend(b.features[i * d..(i + 1) * d].iter().map(f64::to_string));
            row.push(label.clone());
            row.push(b.match_id.clone());
            row.push(turn.to_string());
            w.write_record(&row).map_err(Error::csv(path))?;
        }
    }
    w.flush().map_err(Error::io(path))
}

/// A feature CSV read back: the dataset plus the per-row match ids.
pub struct FeatureTable {
    pub data: Dataset,
    pub match_ids: Vec<String>,
    pub turns: Vec<u32>,
}

pub fn read_features(path: &Path) -> Result<FeatureTable> {
    let mut r = csv::Reader::from_path(path).map_err(Error::csv(path))?;
    let header = r.headers().map_err(Error::csv(path))?.clone();
    let n = header.len();
    if n < 4 || header.iter().skip(n - 3).ne(TRAILER) {
        return Err(Error::data(path)(prefmodel_core::Error::Schema(TRAILER.join(","))));
    }
    let names: Vec<String> = header.iter().take(n - 3).map(String::from).collect();
    let mut table = FeatureTable {
        data: Dataset::with_names(names.clone()),
        match_ids: Vec::new(),
        turns: Vec::new(),
    };
    let mut x = vec![0.0; n - 3];
    for rec in r.records() {
        let rec = rec.map_err(Error::csv(path))?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |column: &str, raw: &str| Error::Parse {
            path: path.to_path_buf(),
            line,
            column: column.to_string(),
            message: format!("`{raw}` is not a number"),
        };
        for (j, v) in x.iter_mut().enumerate() {
            let raw = rec.get(j).unwrap_or("");
            *v = raw.trim().parse().map_err(|_| bad(&names[j], raw))?;
        }
        let raw = rec.get(n - 3).unwrap_or("");
        let label = raw
            .trim()
            .parse::<i8>()
            .ok()
            .and_then(|v| Label::from_i8(v).ok())
            .ok_or_else(|| bad("label", raw))?;
        let raw_turn = rec.get(n - 1).unwrap_or("");
        table
            .turns
            .push(raw_turn.trim().parse().map_err(|_| bad("turn", raw_turn))?);
        table.match_ids.push(rec.get(n - 2).unwrap_or("").to_string());
        table.data.push(&x, label).map_err(Error::data(path))?;
    }
    Ok(table)
}

/// `c_exp,g_exp,accuracy,wall_time,failure`, one row per cell.
pub fn write_grid(path: &Path, outcome: &GridOutcome) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(Error::csv(path))?;
    w.write_record(["c_exp", "g_exp", "accuracy", "wall_time", "failure"])
        .map_err(Error::csv(path))?;
    for c in &outcome.cells {
        w.write_record([
            c.c_exp.to_string(),
            c.g_exp.to_string(),
            c.accuracy.to_string(),
            format!("{:.6}", c.wall_time),
            c.failure.clone().unwrap_or_default(),
        ])
        .map_err(Error::csv(path))?;
    }
    w.flush().map_err(Error::io(path))
}

fn pct(v: f64) -> String {
    format!("{:.1}", v * 100.0)
}

/// Rows are preferences, columns the majority baseline and, per learner,
/// mean accuracy, its RMSE and the relative improvement (all in percent).
pub fn rollup_csv(reports: &[EvalReport]) -> String {
    let mut learners: Vec<LearnerKind> = reports.iter().map(|r| r.learner).collect();
    learners.sort();
    learners.dedup();
    let mut out = String::from("preference,majority");
    for l in &learners {
        out.push_str(&format!(",{l}_accuracy,{l}_rmse,{l}_improvement"));
    }
    out.push('\n');
    for p in Preference::ALL {
        let row: Vec<&EvalReport> = reports.iter().filter(|r| r.preference == p).collect();
        let Some(first) = row.first() else { continue };
        out.push_str(&format!("{},{}", p.title(), pct(first.majority_baseline)));
        for l in &learners {
            match row.iter().find(|r| r.learner == *l) {
                Some(r) => out.push_str(&format!(
                    ",{},{},{}",
                    pct(r.mean_accuracy),
                    pct(r.rmse),
                    pct(r.improvement)
                )),
                None => out.push_str(",,,"),
            }
        }
        out.push('\n');
    }
    out
}

/// Indicator, agent, interval, subset, R², `b0 ± hw`, `b1 ± hw`, confidence.
pub fn characterization_csv(report: &CharacterizationReport) -> String {
    let name = match report.transform {
        Some(k) => format!("root{k}({})", report.indicator.title()),
        None => report.indicator.title().to_string(),
    };
    let mut out = String::from("indicator,agent,interval,subset,r_squared,b0,b0_hw,b1,b1_hw,confidence\n");
    for agent in &report.agents {
        for (fit, (lo, hi)) in agent.fits.iter().zip(&report.intervals) {
            out.push_str(&format!(
                "{name},{},[{lo}:{hi}],{},{:.4},{},{},{},{},{}\n",
                agent.agent,
                report.subset.title(),
                fit.r_squared,
                fit.estimate(Coefficient::B0),
                fit.half_width(Coefficient::B0),
                fit.estimate(Coefficient::B1),
                fit.half_width(Coefficient::B1),
                report.confidence.value(),
            ));
        }
    }
    out
}
