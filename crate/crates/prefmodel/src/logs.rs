//! Match logs on disk: `<match_id>.csv` with one row per turn plus a
//! `<match_id>.json` sidecar holding the header.

use std::fs;
use std::path::{Path, PathBuf};

use prefmodel_core::telemetry::MatchHeader;
use prefmodel_core::{Indicator, MatchLog, Outcome, PreferenceVector, TurnRecord, VictoryType};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Contents of the sidecar file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub match_id: String,
    pub agent_id: String,
    pub preference: PreferenceVector,
    pub outcome: Option<Outcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opponent_match_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victory_type: Option<VictoryType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peace: Option<bool>,
}

impl From<&MatchHeader> for Sidecar {
    fn from(h: &MatchHeader) -> Self {
        Sidecar {
            match_id: h.match_id.clone(),
            agent_id: h.agent_id.clone(),
            preference: h.preference,
            outcome: h.outcome,
            opponent_match_id: h.opponent_match_id.clone(),
            victory_type: h.victory_type,
            peace: h.peace,
        }
    }
}

impl From<Sidecar> for MatchHeader {
    fn from(s: Sidecar) -> Self {
        let mut h = MatchHeader::new(s.match_id, s.agent_id, s.preference);
        h.outcome = s.outcome;
        h.opponent_match_id = s.opponent_match_id;
        h.victory_type = s.victory_type;
        h.peace = s.peace;
        h
    }
}

pub fn csv_path(dir: &Path, match_id: &str) -> PathBuf {
    dir.join(format!("{match_id}.csv"))
}

/// Writes the CSV and the sidecar. The end-of-match columns are appended
/// when both are known.
pub fn write_log(dir: &Path, log: &MatchLog) -> Result<()> {
    let path = csv_path(dir, log.match_id());
    let mut w = csv::Writer::from_path(&path).map_err(Error::csv(&path))?;
    let end = match (log.victory_type(), log.peace()) {
        (Some(v), Some(p)) => Some((v.code().to_string(), u8::from(p).to_string())),
        _ => None,
    };
    let mut header = vec!["turn"];
    header.extend(Indicator::RECORDED.iter().map(|i| i.column()));
    if end.is_some() {
        header.extend(["victory_type", "peace"]);
    }
    w.write_record(&header).map_err(Error::csv(&path))?;
    let mut row = Vec::with_capacity(header.len());
    for t in log.turns() {
        row.clear();
        row.push(t.turn.to_string());
        row.extend(Indicator::RECORDED.iter().map(|&i| t.get(i).to_string()));
        if let Some((v, p)) = &end {
            row.push(v.clone());
            row.push(p.clone());
        }
        w.write_record(&row).map_err(Error::csv(&path))?;
    }
    w.flush().map_err(Error::io(&path))?;

    let side = path.with_extension("json");
    let json = serde_json::to_string_pretty(&Sidecar::from(log.header())).map_err(Error::json(&side))?;
    fs::write(&side, json + "\n").map_err(Error::io(&side))
}

pub fn write_logs(dir: &Path, logs: &[MatchLog]) -> Result<()> {
    fs::create_dir_all(dir).map_err(Error::io(dir))?;
    logs.iter().try_for_each(|l| write_log(dir, l))
}

fn parse<T: std::str::FromStr>(path: &Path, line: u64, column: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.trim().parse().map_err(|e: T::Err| Error::Parse {
        path: path.to_path_buf(),
        line,
        column: column.to_string(),
        message: format!("`{raw}`: {e}"),
    })
}

/// Reads a log CSV and its sidecar (same stem, `.json`).
pub fn read_log(path: &Path) -> Result<MatchLog> {
    let side = path.with_extension("json");
    let text = fs::read_to_string(&side).map_err(Error::io(&side))?;
    let sidecar: Sidecar = serde_json::from_str(&text).map_err(Error::json(&side))?;
    let mut header = MatchHeader::from(sidecar);

    let mut r = csv::Reader::from_path(path).map_err(Error::csv(path))?;
    let columns = r.headers().map_err(Error::csv(path))?.clone();
    let find = |name: &str| columns.iter().position(|c| c.trim() == name);
    let missing = |name: &str| Error::data(path)(prefmodel_core::Error::Schema(name.to_string()));
    let turn_col = find("turn").ok_or_else(|| missing("turn"))?;
    let mut cols = Vec::with_capacity(Indicator::RECORDED.len());
    for ind in Indicator::RECORDED {
        cols.push((ind, find(ind.column()).ok_or_else(|| missing(ind.column()))?));
    }
    let victory_col = find("victory_type");
    let peace_col = find("peace");

    let mut turns = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(Error::csv(path))?;
        let line = rec.position().map_or(i as u64 + 2, |p| p.line());
        let field = |c: usize| rec.get(c).unwrap_or("");
        let mut t = TurnRecord::new(parse(path, line, "turn", field(turn_col))?);
        for &(ind, c) in &cols {
            let v: f64 = parse(path, line, ind.column(), field(c))?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    column: ind.column().to_string(),
                    message: format!("non-finite value `{}`", field(c)),
                });
            }
            t.set(ind, v);
        }
        if i == 0 {
            if let (None, Some(c)) = (header.victory_type, victory_col) {
                header.victory_type = Some(parse(path, line, "victory_type", field(c))?);
            }
            if let (None, Some(c)) = (header.peace, peace_col) {
                header.peace = Some(parse::<u8>(path, line, "peace", field(c))? != 0);
            }
        }
        turns.push(t);
    }
    MatchLog::new(header, turns).map_err(Error::data(path))
}

/// Every `*.csv` log in `dir`, in file-name order.
pub fn read_logs(dir: &Path) -> Result<Vec<MatchLog>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(Error::io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::Usage(format!("no match logs (*.csv) in {}", dir.display())));
    }
    paths.iter().map(|p| read_log(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use prefmodel_core::simulator::{make_agent, simulate_match};

    #[test]
    fn round_trip() {
        let a = make_agent("a", PreferenceVector::from_levels([5, 0, 0, 0, 2, 0]).unwrap(), 1);
        let b = make_agent("b", PreferenceVector::default(), 2);
        let (la, lb) = simulate_match(&a, &b, 30, "00", 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_logs(dir.path(), &[la.clone(), lb.clone()]).unwrap();
        let back = read_logs(dir.path()).unwrap();
        assert_eq!(back, vec![la, lb]);
    }

    #[test]
    fn errors_name_line_and_column() {
        let a = make_agent("a", PreferenceVector::default(), 1);
        let (la, _) = simulate_match(&a, &a, 10, "00", 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_log(dir.path(), &la).unwrap();
        let path = csv_path(dir.path(), la.match_id());
        let text = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut cells: Vec<String> = lines[3].split(',').map(String::from).collect();
        cells[2] = "lots".into();
        lines[3] = cells.join(",");
        fs::write(&path, lines.join("\n")).unwrap();
        let msg = read_log(&path).unwrap_err().to_string();
        assert!(msg.contains("line 4") && msg.contains("`cities`"), "{msg}");

        lines[0] = lines[0].replace(",culture,", ",kultur,");
        fs::write(&path, lines.join("\n")).unwrap();
        let msg = read_log(&path).unwrap_err().to_string();
        assert!(msg.contains("missing column `culture`"), "{msg}");
    }
}
