//! Per-turn match logs: the canonical in-memory data model.

use core::fmt;
use core::ops::RangeInclusive;
use core::str::FromStr;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preference::PreferenceVector;

/// Turn-count range of the reference dataset (shortest 240, longest 460).
pub const TURN_RANGE: RangeInclusive<u32> = 240..=460;

/// Base game indicators recorded every turn, followed by the four
/// war-history series derived from the flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Indicator {
    War,
    Cities,
    Units,
    Population,
    Gold,
    Land,
    Plots,
    Techs,
    Score,
    Economy,
    Industry,
    Agriculture,
    Power,
    Culture,
    Maintenance,
    GoldRate,
    ResearchRate,
    CultureRate,
    StateReligionDiff,
    DeclaredWar,
    CumulativeDeclaredWar,
    AverageDeclaredWar,
    CumulativeWar,
    AverageWar,
}

pub const INDICATOR_COUNT: usize = 24;

impl Indicator {
    pub const ALL: [Indicator; INDICATOR_COUNT] = [
        Indicator::War,
        Indicator::Cities,
        Indicator::Units,
        Indicator::Population,
        Indicator::Gold,
        Indicator::Land,
        Indicator::Plots,
        Indicator::Techs,
        Indicator::Score,
        Indicator::Economy,
        Indicator::Industry,
        Indicator::Agriculture,
        Indicator::Power,
        Indicator::Culture,
        Indicator::Maintenance,
        Indicator::GoldRate,
        Indicator::ResearchRate,
        Indicator::CultureRate,
        Indicator::StateReligionDiff,
        Indicator::DeclaredWar,
        Indicator::CumulativeDeclaredWar,
        Indicator::AverageDeclaredWar,
        Indicator::CumulativeWar,
        Indicator::AverageWar,
    ];

    /// Indicators present as CSV columns, in column order.
    pub const RECORDED: [Indicator; 20] = [
        Indicator::War,
        Indicator::Cities,
        Indicator::Units,
        Indicator::Population,
        Indicator::Gold,
        Indicator::Land,
        Indicator::Plots,
        Indicator::Techs,
        Indicator::Score,
        Indicator::Economy,
        Indicator::Industry,
        Indicator::Agriculture,
        Indicator::Power,
        Indicator::Culture,
        Indicator::Maintenance,
        Indicator::GoldRate,
        Indicator::ResearchRate,
        Indicator::CultureRate,
        Indicator::StateReligionDiff,
        Indicator::DeclaredWar,
    ];

    pub const DERIVED: [Indicator; 4] = [
        Indicator::CumulativeDeclaredWar,
        Indicator::AverageDeclaredWar,
        Indicator::CumulativeWar,
        Indicator::AverageWar,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// snake_case CSV column name.
    pub fn column(self) -> &'static str {
        match self {
            Indicator::War => "war",
            Indicator::Cities => "cities",
            Indicator::Units => "units",
            Indicator::Population => "population",
            Indicator::Gold => "gold",
            Indicator::Land => "land",
            Indicator::Plots => "plots",
            Indicator::Techs => "techs",
            Indicator::Score => "score",
            Indicator::Economy => "economy",
            Indicator::Industry => "industry",
            Indicator::Agriculture => "agriculture",
            Indicator::Power => "power",
            Indicator::Culture => "culture",
            Indicator::Maintenance => "maintenance",
            Indicator::GoldRate => "gold_rate",
            Indicator::ResearchRate => "research_rate",
            Indicator::CultureRate => "culture_rate",
            Indicator::StateReligionDiff => "state_religion_diff",
            Indicator::DeclaredWar => "declared_war",
            Indicator::CumulativeDeclaredWar => "cumulative_declared_war",
            Indicator::AverageDeclaredWar => "average_declared_war",
            Indicator::CumulativeWar => "cumulative_war",
            Indicator::AverageWar => "average_war",
        }
    }

    /// CamelCase name used by the feature registry.
    pub fn title(self) -> &'static str {
        match self {
            Indicator::War => "War",
            Indicator::Cities => "Cities",
            Indicator::Units => "Units",
            Indicator::Population => "Population",
            Indicator::Gold => "Gold",
            Indicator::Land => "Land",
            Indicator::Plots => "Plots",
            Indicator::Techs => "Techs",
            Indicator::Score => "Score",
            Indicator::Economy => "Economy",
            Indicator::Industry => "Industry",
            Indicator::Agriculture => "Agriculture",
            Indicator::Power => "Power",
            Indicator::Culture => "Culture",
            Indicator::Maintenance => "Maintenance",
            Indicator::GoldRate => "GoldRate",
            Indicator::ResearchRate => "ResearchRate",
            Indicator::CultureRate => "CultureRate",
            Indicator::StateReligionDiff => "StateReligionDiff",
            Indicator::DeclaredWar => "DeclaredWar",
            Indicator::CumulativeDeclaredWar => "CumulativeDeclaredWar",
            Indicator::AverageDeclaredWar => "AverageDeclaredWar",
            Indicator::CumulativeWar => "CumulativeWar",
            Indicator::AverageWar => "AverageWar",
        }
    }

    pub fn is_flag(self) -> bool {
        matches!(self, Indicator::War | Indicator::DeclaredWar)
    }
}

impl fmt::Display for Indicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for Indicator {
    type Err = Error;

    /// Accepts either the column name or the CamelCase title.
    fn from_str(s: &str) -> Result<Self> {
        Indicator::ALL
            .into_iter()
            .find(|i| i.column() == s || i.title().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown indicator `{s}`")))
    }
}

/// Indicator values at the end of one turn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    pub turn: u32,
    values: [f64; INDICATOR_COUNT],
}

impl TurnRecord {
    /// A record with every indicator at zero.
    pub fn new(turn: u32) -> Self {
        TurnRecord {
            turn,
            values: [0.0; INDICATOR_COUNT],
        }
    }

    pub fn get(&self, indicator: Indicator) -> f64 {
        self.values[indicator.index()]
    }

    pub fn set(&mut self, indicator: Indicator, value: f64) {
        self.values[indicator.index()] = value;
    }

    pub fn with(mut self, indicator: Indicator, value: f64) -> Self {
        self.set(indicator, value);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Victory,
    Defeat,
}

impl FromStr for Outcome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "victory" => Ok(Outcome::Victory),
            "defeat" => Ok(Outcome::Defeat),
            _ => Err(Error::Domain(format!("unknown outcome `{s}`"))),
        }
    }
}

/// How a match ended. Six victory conditions plus `TimeOut` for a match
/// that reached the turn limit without any condition being met.
///
/// The numeric codes are a local convention; they are what the VictoryType
/// feature carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VictoryType {
    TimeOut,
    Time,
    Conquest,
    Domination,
    Cultural,
    SpaceRace,
    Diplomatic,
}

impl VictoryType {
    pub const ALL: [VictoryType; 7] = [
        VictoryType::TimeOut,
        VictoryType::Time,
        VictoryType::Conquest,
        VictoryType::Domination,
        VictoryType::Cultural,
        VictoryType::SpaceRace,
        VictoryType::Diplomatic,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Result<Self> {
        VictoryType::ALL
            .get(usize::from(code))
            .copied()
            .ok_or_else(|| Error::Domain(format!("victory type code {code} out of range 0..=6")))
    }

    pub fn name(self) -> &'static str {
        match self {
            VictoryType::TimeOut => "time_out",
            VictoryType::Time => "time",
            VictoryType::Conquest => "conquest",
            VictoryType::Domination => "domination",
            VictoryType::Cultural => "cultural",
            VictoryType::SpaceRace => "space_race",
            VictoryType::Diplomatic => "diplomatic",
        }
    }
}

impl FromStr for VictoryType {
    type Err = Error;

    /// Accepts the name or the numeric code.
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(code) = s.parse::<u8>() {
            return VictoryType::from_code(code);
        }
        VictoryType::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown victory type `{s}`")))
    }
}

/// Everything about a log except its turns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchHeader {
    pub match_id: String,
    pub agent_id: String,
    pub preference: PreferenceVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opponent_match_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<Outcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victory_type: Option<VictoryType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peace: Option<bool>,
}

impl MatchHeader {
    pub fn new(match_id: impl Into<String>, agent_id: impl Into<String>, preference: PreferenceVector) -> Self {
        MatchHeader {
            match_id: match_id.into(),
            agent_id: agent_id.into(),
            preference,
            opponent_match_id: None,
            outcome: None,
            victory_type: None,
            peace: None,
        }
    }
}

/// One player's view of one match. Immutable once built; construction
/// validates the turn sequence and recomputes the war-history series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchLog {
    header: MatchHeader,
    turns: Vec<TurnRecord>,
}

impl MatchLog {
    /// Validates and normalizes: rows are sorted by turn, turns must run
    /// 1, 2, ... without gaps, flags must be 0 or 1. Cumulative and average
    /// war series are recomputed from the flags, overwriting input values.
    pub fn new(header: MatchHeader, mut turns: Vec<TurnRecord>) -> Result<Self> {
        if turns.is_empty() {
            return Err(Error::Structure(format!("match `{}` has no turns", header.match_id)));
        }
        turns.sort_by_key(|r| r.turn);
        for (i, rec) in turns.iter().enumerate() {
            let expected = i as u32 + 1;
            if rec.turn != expected {
                return Err(Error::NonContiguousTurns {
                    expected,
                    found: rec.turn,
                });
            }
            for flag in [Indicator::War, Indicator::DeclaredWar] {
                let v = rec.get(flag);
                if v != 0.0 && v != 1.0 {
                    return Err(Error::Domain(format!(
                        "{} must be 0 or 1, found {v} at turn {}",
                        flag.column(),
                        rec.turn
                    )));
                }
            }
        }
        fill_cumulatives(&mut turns);
        Ok(MatchLog { header, turns })
    }

    pub fn header(&self) -> &MatchHeader {
        &self.header
    }

    pub fn match_id(&self) -> &str {
        &self.header.match_id
    }

    pub fn agent_id(&self) -> &str {
        &self.header.agent_id
    }

    pub fn preference(&self) -> &PreferenceVector {
        &self.header.preference
    }

    pub fn opponent_match_id(&self) -> Option<&str> {
        self.header.opponent_match_id.as_deref()
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.header.outcome
    }

    pub fn victory_type(&self) -> Option<VictoryType> {
        self.header.victory_type
    }

    pub fn peace(&self) -> Option<bool> {
        self.header.peace
    }

    pub fn turns(&self) -> &[TurnRecord] {
        &self.turns
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }

    /// Record for a 1-based turn number.
    pub fn turn(&self, turn: u32) -> Option<&TurnRecord> {
        (turn as usize).checked_sub(1).and_then(|i| self.turns.get(i))
    }

    pub fn series(&self, indicator: Indicator) -> Vec<f64> {
        self.turns.iter().map(|r| r.get(indicator)).collect()
    }

    /// Errors when the match length falls outside `range`.
    pub fn check_length(&self, range: RangeInclusive<u32>) -> Result<()> {
        let n = self.turns.len() as u32;
        if range.contains(&n) {
            Ok(())
        } else {
            Err(Error::Structure(format!(
                "match `{}` has {n} turns, outside [{}, {}]",
                self.header.match_id,
                range.start(),
                range.end()
            )))
        }
    }

    pub fn into_parts(self) -> (MatchHeader, Vec<TurnRecord>) {
        (self.header, self.turns)
    }
}

fn fill_cumulatives(turns: &mut [TurnRecord]) {
    let mut war = 0.0;
    let mut declared = 0.0;
    for (i, rec) in turns.iter_mut().enumerate() {
        let t = (i + 1) as f64;
        war += rec.get(Indicator::War);
        declared += rec.get(Indicator::DeclaredWar);
        rec.set(Indicator::CumulativeWar, war);
        rec.set(Indicator::AverageWar, war / t);
        rec.set(Indicator::CumulativeDeclaredWar, declared);
        rec.set(Indicator::AverageDeclaredWar, declared / t);
    }
}

/// Recomputes `CumulativeWar(t) = Σ_{i≤t} War(i)`, `AverageWar(t) =
/// CumulativeWar(t) / t` and the same pair for DeclaredWar. Existing
/// values are overwritten, so the operation is idempotent.
///
/// `AverageWar` is taken to be the running mean of the flag; the source
/// feature list names the series without defining it.
pub fn derive_cumulatives(log: MatchLog) -> MatchLog {
    let MatchLog { header, mut turns } = log;
    fill_cumulatives(&mut turns);
    MatchLog { header, turns }
}

/// Checks that two logs describe the two sides of the same match.
pub fn check_pair(own: &MatchLog, opp: &MatchLog) -> Result<()> {
    if own.len() != opp.len() {
        return Err(Error::Pairing(format!(
            "`{}` has {} turns but opponent `{}` has {}",
            own.match_id(),
            own.len(),
            opp.match_id(),
            opp.len()
        )));
    }
    if let Some(link) = own.opponent_match_id() {
        if link != opp.match_id() {
            return Err(Error::Pairing(format!(
                "`{}` links to opponent `{link}`, not `{}`",
                own.match_id(),
                opp.match_id()
            )));
        }
    }
    if let Some(link) = opp.opponent_match_id() {
        if link != own.match_id() {
            return Err(Error::Pairing(format!(
                "`{}` links to opponent `{link}`, not `{}`",
                opp.match_id(),
                own.match_id()
            )));
        }
    }
    Ok(())
}

/// Pairs every log with its opponent through `opponent_match_id`.
/// Returns `(own, opponent)` index pairs in input order.
pub fn pair_logs(logs: &[MatchLog]) -> Result<Vec<(usize, usize)>> {
    let mut by_id: alloc::collections::BTreeMap<&str, usize> = alloc::collections::BTreeMap::new();
    for (i, log) in logs.iter().enumerate() {
        if by_id.insert(log.match_id(), i).is_some() {
            return Err(Error::Structure(format!("duplicate match id `{}`", log.match_id())));
        }
    }
    logs.iter()
        .enumerate()
        .map(|(i, log)| {
            let link = log
                .opponent_match_id()
                .ok_or_else(|| Error::Pairing(format!("`{}` has no opponent link", log.match_id())))?;
            let j = *by_id
                .get(link)
                .ok_or_else(|| Error::Pairing(format!("opponent `{link}` of `{}` not found", log.match_id())))?;
            check_pair(log, &logs[j])?;
            Ok((i, j))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn header(id: &str) -> MatchHeader {
        MatchHeader::new(id, "agent", PreferenceVector::default())
    }

    fn with_war(flags: &[f64]) -> Vec<TurnRecord> {
        flags
            .iter()
            .enumerate()
            .map(|(i, &w)| TurnRecord::new(i as u32 + 1).with(Indicator::War, w))
            .collect()
    }

    #[test]
    fn cumulatives_from_flags() {
        let log = MatchLog::new(header("m"), with_war(&[0.0, 1.0, 1.0])).unwrap();
        assert_eq!(log.series(Indicator::CumulativeWar), vec![0.0, 1.0, 2.0]);
        let avg = log.series(Indicator::AverageWar);
        assert_eq!(avg[0], 0.0);
        assert_eq!(avg[1], 0.5);
        assert!((avg[2] - 0.666_666_666_7).abs() < 1e-9);
    }

    #[test]
    fn all_zero_war_gives_zero_history() {
        let log = MatchLog::new(header("m"), with_war(&[0.0; 10])).unwrap();
        for ind in Indicator::DERIVED {
            assert!(log.series(ind).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn constant_war_average_is_one() {
        let log = MatchLog::new(header("m"), with_war(&[1.0; 5])).unwrap();
        assert!(log.series(Indicator::AverageWar).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn input_cumulatives_are_overwritten() {
        let mut turns = with_war(&[1.0, 0.0]);
        turns[1].set(Indicator::CumulativeWar, 42.0);
        let log = MatchLog::new(header("m"), turns).unwrap();
        assert_eq!(log.series(Indicator::CumulativeWar), vec![1.0, 1.0]);
        let again = derive_cumulatives(log.clone());
        assert_eq!(again, log);
    }

    #[test]
    fn gap_is_structure_error() {
        let turns = vec![TurnRecord::new(1), TurnRecord::new(2), TurnRecord::new(4)];
        let err = MatchLog::new(header("m"), turns).unwrap_err();
        assert_eq!(err, Error::NonContiguousTurns { expected: 3, found: 4 });
    }

    #[test]
    fn rows_are_sorted_by_turn() {
        let turns = vec![TurnRecord::new(2), TurnRecord::new(1), TurnRecord::new(3)];
        let log = MatchLog::new(header("m"), turns).unwrap();
        let order: Vec<u32> = log.turns().iter().map(|r| r.turn).collect();
        assert_eq!(order, vec![1, 2, 3]);
    }

    #[test]
    fn non_binary_flag_rejected() {
        let turns = vec![TurnRecord::new(1).with(Indicator::DeclaredWar, 2.0)];
        assert!(matches!(MatchLog::new(header("m"), turns), Err(Error::Domain(_))));
    }

    #[test]
    fn pairing_checks_length_and_links() {
        let mut ha = header("a");
        ha.opponent_match_id = Some("b".into());
        let mut hb = header("b");
        hb.opponent_match_id = Some("a".into());
        let a = MatchLog::new(ha, with_war(&[0.0; 4])).unwrap();
        let b = MatchLog::new(hb.clone(), with_war(&[0.0; 4])).unwrap();
        assert!(check_pair(&a, &b).is_ok());
        assert_eq!(pair_logs(&[a.clone(), b]).unwrap(), vec![(0, 1), (1, 0)]);
        let short = MatchLog::new(hb, with_war(&[0.0; 3])).unwrap();
        assert!(matches!(check_pair(&a, &short), Err(Error::Pairing(_))));
    }

    #[test]
    fn length_bounds() {
        let log = MatchLog::new(header("m"), with_war(&[0.0; 10])).unwrap();
        assert!(log.check_length(TURN_RANGE).is_err());
        assert!(log.check_length(1..=10).is_ok());
    }

    #[test]
    fn victory_codes_round_trip() {
        for v in VictoryType::ALL {
            assert_eq!(VictoryType::from_code(v.code()).unwrap(), v);
            assert_eq!(v.name().parse::<VictoryType>().unwrap(), v);
        }
        assert!(VictoryType::from_code(7).is_err());
    }
}
