//! Composite feature expansion.
//!
//! Every turn of a match becomes one instance. Thirteen score indicators get
//! the full set of seven composite operators, four rate indicators get the
//! three own-series operators, the war and religion indicators are copied
//! as-is, and two end-of-match fields are appended in offline mode: 130
//! features offline, 128 online.

use core::fmt;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preference::{Label, Preference};
use crate::telemetry::{check_pair, Indicator, MatchLog};

/// Earliest turn with a complete five-turn look-back (`v_{t-5}` exists).
pub const MIN_TURN: u32 = 6;

/// Default cutoff: instances from the first 100 turns are discarded.
pub const DEFAULT_CUTOFF: u32 = 100;

/// Temporal and opponent-relative operators over a base series `v` and the
/// opponent's series `w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Composite {
    /// `v_t − v_{t−1}`
    Derivate,
    /// `(Σ_{i=0..4} v_{t−i}) / 5`
    Trend,
    /// `v_t − v_{t−5}`
    TrendDerivate,
    /// `v_t − w_t`
    Diff,
    /// `(v_t − w_t) − (v_{t−1} − w_{t−1})`
    DiffDerivate,
    /// `(Σ_{i=0..4} (v_{t−i} − w_{t−i})) / 5`
    DiffTrend,
    /// `(v_t − w_t) − (v_{t−5} − w_{t−5})`
    DiffTrendDerivate,
}

impl Composite {
    pub const ALL: [Composite; 7] = [
        Composite::Derivate,
        Composite::Trend,
        Composite::TrendDerivate,
        Composite::Diff,
        Composite::DiffDerivate,
        Composite::DiffTrend,
        Composite::DiffTrendDerivate,
    ];

    pub const OWN: [Composite; 3] = [Composite::Derivate, Composite::Trend, Composite::TrendDerivate];

    pub fn suffix(self) -> &'static str {
        match self {
            Composite::Derivate => "Derivate",
            Composite::Trend => "Trend",
            Composite::TrendDerivate => "TrendDerivate",
            Composite::Diff => "Diff",
            Composite::DiffDerivate => "DiffDerivate",
            Composite::DiffTrend => "DiffTrend",
            Composite::DiffTrendDerivate => "DiffTrendDerivate",
        }
    }

    /// Evaluates the operator at 0-based position `i`; the caller guarantees
    /// `i >= 5`.
    #[inline]
    fn eval(self, v: impl Fn(usize) -> f64, w: impl Fn(usize) -> f64, i: usize) -> f64 {
        let d = |k: usize| v(k) - w(k);
        match self {
            Composite::Derivate => v(i) - v(i - 1),
            Composite::Trend => (v(i) + v(i - 1) + v(i - 2) + v(i - 3) + v(i - 4)) / 5.0,
            Composite::TrendDerivate => v(i) - v(i - 5),
            Composite::Diff => d(i),
            Composite::DiffDerivate => d(i) - d(i - 1),
            Composite::DiffTrend => (d(i) + d(i - 1) + d(i - 2) + d(i - 3) + d(i - 4)) / 5.0,
            Composite::DiffTrendDerivate => d(i) - d(i - 5),
        }
    }
}

/// All seven composites of series `v` (own) and `w` (opponent) at 1-based
/// turn `t`, in [`Composite::ALL`] order.
pub fn compose_series(v: &[f64], w: &[f64], t: u32) -> Result<[f64; 7]> {
    if v.len() != w.len() {
        return Err(Error::Pairing(format!(
            "series lengths differ ({} vs {})",
            v.len(),
            w.len()
        )));
    }
    if t < MIN_TURN || t as usize > v.len() {
        return Err(Error::Window {
            turn: t,
            required: MIN_TURN - 1,
        });
    }
    let i = t as usize - 1;
    Ok(Composite::ALL.map(|c| c.eval(|k| v[k], |k| w[k], i)))
}

/// Score indicators that receive all seven composites.
pub const FULL_COMPOSITE: [Indicator; 13] = [
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
];

/// Rate indicators that receive only the own-series composites.
pub const OWN_COMPOSITE: [Indicator; 4] = [
    Indicator::Maintenance,
    Indicator::GoldRate,
    Indicator::ResearchRate,
    Indicator::CultureRate,
];

/// Indicators copied without composites, after the composite blocks.
pub const PLAIN_TAIL: [Indicator; 6] = [
    Indicator::StateReligionDiff,
    Indicator::DeclaredWar,
    Indicator::CumulativeDeclaredWar,
    Indicator::AverageDeclaredWar,
    Indicator::CumulativeWar,
    Indicator::AverageWar,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Feature {
    Turn,
    Base(Indicator),
    Composite(Indicator, Composite),
    VictoryType,
    Peace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Base,
    Composite(Composite),
    EndOfMatch,
}

impl Feature {
    pub fn kind(self) -> FeatureKind {
        match self {
            Feature::Turn | Feature::Base(_) => FeatureKind::Base,
            Feature::Composite(_, c) => FeatureKind::Composite(c),
            Feature::VictoryType | Feature::Peace => FeatureKind::EndOfMatch,
        }
    }

    pub fn name(self) -> String {
        match self {
            Feature::Turn => String::from("Turn"),
            Feature::Base(ind) => String::from(ind.title()),
            Feature::Composite(ind, c) => format!("{}{}", ind.title(), c.suffix()),
            Feature::VictoryType => String::from("VictoryType"),
            Feature::Peace => String::from("Peace"),
        }
    }
}

/// Which end-of-match information is available to the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Per-turn tracking during play: 128 features.
    #[default]
    Online,
    /// Review after the match: adds VictoryType and Peace, 130 features.
    Offline,
}

impl Mode {
    pub fn feature_count(self) -> usize {
        match self {
            Mode::Online => 128,
            Mode::Offline => 130,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Online => "online",
            Mode::Offline => "offline",
        })
    }
}

impl core::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "online" => Ok(Mode::Online),
            "offline" => Ok(Mode::Offline),
            _ => Err(Error::Domain(format!("unknown mode `{s}` (online|offline)"))),
        }
    }
}

/// 64-bit digest of an ordered feature name list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub u64);

impl Fingerprint {
    /// FNV-1a over the names, each terminated by a newline.
    pub fn of_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for name in names {
            for b in name.bytes().chain(core::iter::once(b'\n')) {
                h ^= u64::from(b);
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        Fingerprint(h)
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let s = <alloc::borrow::Cow<'de, str>>::deserialize(d)?;
        u64::from_str_radix(&s, 16)
            .map(Fingerprint)
            .map_err(serde::de::Error::custom)
    }
}

/// Ordered feature list for one mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureRegistry {
    mode: Mode,
    features: Vec<Feature>,
}

impl FeatureRegistry {
    pub fn new(mode: Mode) -> Self {
        let mut features = Vec::with_capacity(130);
        features.push(Feature::Turn);
        features.push(Feature::Base(Indicator::War));
        for ind in FULL_COMPOSITE {
            features.push(Feature::Base(ind));
            features.extend(Composite::ALL.iter().map(|&c| Feature::Composite(ind, c)));
        }
        for ind in OWN_COMPOSITE {
            features.push(Feature::Base(ind));
            features.extend(Composite::OWN.iter().map(|&c| Feature::Composite(ind, c)));
        }
        features.extend(PLAIN_TAIL.iter().map(|&i| Feature::Base(i)));
        if mode == Mode::Offline {
            features.push(Feature::VictoryType);
            features.push(Feature::Peace);
        }
        FeatureRegistry { mode, features }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name()).collect()
    }

    pub fn position(&self, feature: Feature) -> Option<usize> {
        self.features.iter().position(|&f| f == feature)
    }

    pub fn position_by_name(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name() == name)
    }

    pub fn fingerprint(&self) -> Fingerprint {
        let names = self.names();
        Fingerprint::of_names(names.iter().map(String::as_str))
    }
}

/// One turn as a classifier input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub features: Vec<f64>,
    pub label: Label,
    pub match_id: String,
    pub turn: u32,
}

fn feature_value(feature: Feature, own: &MatchLog, opp: &MatchLog, t: u32) -> Result<f64> {
    let i = t as usize - 1;
    let own_turns = own.turns();
    let opp_turns = opp.turns();
    Ok(match feature {
        Feature::Turn => f64::from(t),
        Feature::Base(ind) => own_turns[i].get(ind),
        Feature::Composite(ind, c) => c.eval(|k| own_turns[k].get(ind), |k| opp_turns[k].get(ind), i),
        Feature::VictoryType => f64::from(
            own.victory_type()
                .ok_or_else(|| Error::MissingOutcome(String::from(own.match_id())))?
                .code(),
        ),
        Feature::Peace => {
            if own
                .peace()
                .ok_or_else(|| Error::MissingOutcome(String::from(own.match_id())))?
            {
                1.0
            } else {
                0.0
            }
        }
    })
}

fn check_window(own: &MatchLog, opp: &MatchLog, t: u32) -> Result<()> {
    check_pair(own, opp)?;
    if t < MIN_TURN || t as usize > own.len() {
        return Err(Error::Window {
            turn: t,
            required: MIN_TURN - 1,
        });
    }
    Ok(())
}

/// The 128 online features of `own` at turn `t`, registry order.
pub fn compose_features(own: &MatchLog, opp: &MatchLog, t: u32) -> Result<Vec<f64>> {
    check_window(own, opp, t)?;
    let registry = FeatureRegistry::new(Mode::Online);
    registry
        .features()
        .iter()
        .map(|&f| feature_value(f, own, opp, t))
        .collect()
}

/// Builds one labeled instance for `target`.
pub fn assemble_instance(own: &MatchLog, opp: &MatchLog, t: u32, mode: Mode, target: Preference) -> Result<Instance> {
    check_window(own, opp, t)?;
    build_instance(&FeatureRegistry::new(mode), own, opp, t, target)
}

fn build_instance(
    registry: &FeatureRegistry,
    own: &MatchLog,
    opp: &MatchLog,
    t: u32,
    target: Preference,
) -> Result<Instance> {
    let features = registry
        .features()
        .iter()
        .map(|&f| feature_value(f, own, opp, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(Instance {
        features,
        label: own.preference().label(target),
        match_id: String::from(own.match_id()),
        turn: t,
    })
}

/// Instances for every turn of `own` that has a full window (turn 6 on).
/// Turns 1–5 produce nothing rather than padded values.
pub fn featurize_match(own: &MatchLog, opp: &MatchLog, mode: Mode, target: Preference) -> Result<Vec<Instance>> {
    check_pair(own, opp)?;
    if mode == Mode::Offline && (own.victory_type().is_none() || own.peace().is_none()) {
        return Err(Error::MissingOutcome(String::from(own.match_id())));
    }
    let registry = FeatureRegistry::new(mode);
    (MIN_TURN..=own.len() as u32)
        .map(|t| build_instance(&registry, own, opp, t, target))
        .collect()
}

/// Keeps instances from turns strictly after `cutoff`.
pub fn drop_early_turns(instances: Vec<Instance>, cutoff: u32) -> Vec<Instance> {
    instances.into_iter().filter(|i| i.turn > cutoff).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preference::PreferenceVector;
    use crate::telemetry::{MatchHeader, TurnRecord, VictoryType};
    use alloc::vec;

    /// Reference feature list, frozen verbatim.
    const REFERENCE_NAMES: [&str; 130] = [
        "Turn",
        "War",
        "Cities",
        "CitiesDerivate",
        "CitiesTrend",
        "CitiesTrendDerivate",
        "CitiesDiff",
        "CitiesDiffDerivate",
        "CitiesDiffTrend",
        "CitiesDiffTrendDerivate",
        "Units",
        "UnitsDerivate",
        "UnitsTrend",
        "UnitsTrendDerivate",
        "UnitsDiff",
        "UnitsDiffDerivate",
        "UnitsDiffTrend",
        "UnitsDiffTrendDerivate",
        "Population",
        "PopulationDerivate",
        "PopulationTrend",
        "PopulationTrendDerivate",
        "PopulationDiff",
        "PopulationDiffDerivate",
        "PopulationDiffTrend",
        "PopulationDiffTrendDerivate",
        "Gold",
        "GoldDerivate",
        "GoldTrend",
        "GoldTrendDerivate",
        "GoldDiff",
        "GoldDiffDerivate",
        "GoldDiffTrend",
        "GoldDiffTrendDerivate",
        "Land",
        "LandDerivate",
        "LandTrend",
        "LandTrendDerivate",
        "LandDiff",
        "LandDiffDerivate",
        "LandDiffTrend",
        "LandDiffTrendDerivate",
        "Plots",
        "PlotsDerivate",
        "PlotsTrend",
        "PlotsTrendDerivate",
        "PlotsDiff",
        "PlotsDiffDerivate",
        "PlotsDiffTrend",
        "PlotsDiffTrendDerivate",
        "Techs",
        "TechsDerivate",
        "TechsTrend",
        "TechsTrendDerivate",
        "TechsDiff",
        "TechsDiffDerivate",
        "TechsDiffTrend",
        "TechsDiffTrendDerivate",
        "Score",
        "ScoreDerivate",
        "ScoreTrend",
        "ScoreTrendDerivate",
        "ScoreDiff",
        "ScoreDiffDerivate",
        "ScoreDiffTrend",
        "ScoreDiffTrendDerivate",
        "Economy",
        "EconomyDerivate",
        "EconomyTrend",
        "EconomyTrendDerivate",
        "EconomyDiff",
        "EconomyDiffDerivate",
        "EconomyDiffTrend",
        "EconomyDiffTrendDerivate",
        "Industry",
        "IndustryDerivate",
        "IndustryTrend",
        "IndustryTrendDerivate",
        "IndustryDiff",
        "IndustryDiffDerivate",
        "IndustryDiffTrend",
        "IndustryDiffTrendDerivate",
        "Agriculture",
        "AgricultureDerivate",
        "AgricultureTrend",
        "AgricultureTrendDerivate",
        "AgricultureDiff",
        "AgricultureDiffDerivate",
        "AgricultureDiffTrend",
        "AgricultureDiffTrendDerivate",
        "Power",
        "PowerDerivate",
        "PowerTrend",
        "PowerTrendDerivate",
        "PowerDiff",
        "PowerDiffDerivate",
        "PowerDiffTrend",
        "PowerDiffTrendDerivate",
        "Culture",
        "CultureDerivate",
        "CultureTrend",
        "CultureTrendDerivate",
        "CultureDiff",
        "CultureDiffDerivate",
        "CultureDiffTrend",
        "CultureDiffTrendDerivate",
        "Maintenance",
        "MaintenanceDerivate",
        "MaintenanceTrend",
        "MaintenanceTrendDerivate",
        "GoldRate",
        "GoldRateDerivate",
        "GoldRateTrend",
        "GoldRateTrendDerivate",
        "ResearchRate",
        "ResearchRateDerivate",
        "ResearchRateTrend",
        "ResearchRateTrendDerivate",
        "CultureRate",
        "CultureRateDerivate",
        "CultureRateTrend",
        "CultureRateTrendDerivate",
        "StateReligionDiff",
        "DeclaredWar",
        "CumulativeDeclaredWar",
        "AverageDeclaredWar",
        "CumulativeWar",
        "AverageWar",
        "VictoryType",
        "Peace",
    ];

    #[test]
    fn registry_matches_reference_list() {
        let offline = FeatureRegistry::new(Mode::Offline).names();
        assert_eq!(offline.len(), 130);
        for (got, want) in offline.iter().zip(REFERENCE_NAMES) {
            assert_eq!(got, want);
        }
        let online = FeatureRegistry::new(Mode::Online).names();
        assert_eq!(online.len(), 128);
        assert_eq!(&offline[..128], &online[..]);
        assert_ne!(
            FeatureRegistry::new(Mode::Online).fingerprint(),
            FeatureRegistry::new(Mode::Offline).fingerprint()
        );
    }

    #[test]
    fn linear_series_composites() {
        let v: Vec<f64> = (1..=20).map(f64::from).collect();
        let w = vec![0.0; 20];
        let got = compose_series(&v, &w, 10).unwrap();
        assert_eq!(got, [1.0, 8.0, 5.0, 10.0, 1.0, 8.0, 5.0]);
    }

    #[test]
    fn constant_series_composites() {
        let v = vec![3.5; 12];
        let got = compose_series(&v, &v, 7).unwrap();
        assert_eq!(got, [0.0, 3.5, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn window_and_pairing_errors() {
        let v = vec![1.0; 10];
        assert!(matches!(compose_series(&v, &v, 5), Err(Error::Window { turn: 5, .. })));
        assert!(matches!(compose_series(&v, &v[..9], 7), Err(Error::Pairing(_))));
    }

    fn pair(len: u32, outcome: bool) -> (MatchLog, MatchLog) {
        let pm = PreferenceVector::from_levels([5, 0, 0, 0, 0, 0]).unwrap();
        let mk = |id: &str, opp: &str, scale: f64| {
            let mut h = MatchHeader::new(id, id, pm);
            h.opponent_match_id = Some(opp.into());
            if outcome {
                h.victory_type = Some(VictoryType::Cultural);
                h.peace = Some(true);
            }
            let turns = (1..=len)
                .map(|t| TurnRecord::new(t).with(Indicator::Culture, scale * f64::from(t)))
                .collect();
            MatchLog::new(h, turns).unwrap()
        };
        (mk("a", "b", 2.0), mk("b", "a", 1.0))
    }

    #[test]
    fn instance_lengths_by_mode() {
        let (a, b) = pair(30, true);
        let on = assemble_instance(&a, &b, 10, Mode::Online, Preference::Culture).unwrap();
        let off = assemble_instance(&a, &b, 10, Mode::Offline, Preference::Culture).unwrap();
        assert_eq!(on.features.len(), 128);
        assert_eq!(off.features.len(), 130);
        assert_eq!(on.label, Label::Positive);
        assert_eq!(&off.features[..128], &on.features[..]);
        assert_eq!(off.features[128], f64::from(VictoryType::Cultural.code()));
        assert_eq!(off.features[129], 1.0);
        let reg = FeatureRegistry::new(Mode::Online);
        let diff = reg.position_by_name("CultureDiff").unwrap();
        assert_eq!(on.features[diff], 10.0);
        assert_eq!(on.features[0], 10.0);
    }

    #[test]
    fn offline_without_outcome_is_mode_error() {
        let (a, b) = pair(30, false);
        assert!(matches!(
            assemble_instance(&a, &b, 10, Mode::Offline, Preference::Culture),
            Err(Error::MissingOutcome(_))
        ));
        assert!(featurize_match(&a, &b, Mode::Offline, Preference::Gold).is_err());
        assert_eq!(
            featurize_match(&a, &b, Mode::Online, Preference::Gold).unwrap().len(),
            25
        );
    }

    #[test]
    fn cutoff_filters_by_turn() {
        let (a, b) = pair(460, true);
        let all = featurize_match(&a, &b, Mode::Online, Preference::Culture).unwrap();
        assert_eq!(all.len(), 455);
        assert_eq!(drop_early_turns(all.clone(), 0).len(), 455);
        let kept = drop_early_turns(all.clone(), DEFAULT_CUTOFF);
        assert_eq!(kept.len(), 360);
        assert_eq!(kept[0].turn, 101);
        assert!(drop_early_turns(all, 460).is_empty());
    }
}
