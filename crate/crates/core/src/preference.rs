//! The six-slot preference model and its binary labels.

use core::fmt;
use core::str::FromStr;

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the six agent inclinations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preference {
    Culture,
    Gold,
    Growth,
    Military,
    Religion,
    Science,
}

impl Preference {
    pub const ALL: [Preference; 6] = [
        Preference::Culture,
        Preference::Gold,
        Preference::Growth,
        Preference::Military,
        Preference::Religion,
        Preference::Science,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preference::Culture => "culture",
            Preference::Gold => "gold",
            Preference::Growth => "growth",
            Preference::Military => "military",
            Preference::Religion => "religion",
            Preference::Science => "science",
        }
    }

    /// Capitalized form used in rendered rules and report tables.
    pub fn title(self) -> &'static str {
        match self {
            Preference::Culture => "Culture",
            Preference::Gold => "Gold",
            Preference::Growth => "Growth",
            Preference::Military => "Military",
            Preference::Religion => "Religion",
            Preference::Science => "Science",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Preference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preference {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preference::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown preference `{s}`")))
    }
}

/// Strength of a preference: none (0), weak (2) or strong (5).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Level {
    #[default]
    None,
    Weak,
    Strong,
}

impl Level {
    pub fn value(self) -> u8 {
        match self {
            Level::None => 0,
            Level::Weak => 2,
            Level::Strong => 5,
        }
    }

    pub fn from_value(value: u8) -> Result<Self> {
        match value {
            0 => Ok(Level::None),
            2 => Ok(Level::Weak),
            5 => Ok(Level::Strong),
            other => Err(Error::Domain(format!("preference level {other} is not one of 0, 2, 5"))),
        }
    }

    /// Level scaled to `[0, 1]` (0, 0.4, 1).
    pub fn intensity(self) -> f64 {
        f64::from(self.value()) / 5.0
    }

    pub fn label(self) -> Label {
        match self {
            Level::None => Label::Negative,
            Level::Weak | Level::Strong => Label::Positive,
        }
    }
}

impl Serialize for Level {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.value())
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let v = u8::deserialize(d)?;
        Level::from_value(v).map_err(serde::de::Error::custom)
    }
}

/// Maps a raw preference level onto the binary class: 0 is "no preference"
/// (−1), 2 and 5 are "has preference" (+1).
pub fn binarize_label(level: u8) -> Result<Label> {
    Level::from_value(level).map(Level::label)
}

/// Binary class of an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Negative => -1,
            Label::Positive => 1,
        }
    }

    pub fn from_i8(v: i8) -> Result<Self> {
        match v {
            -1 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(Error::Domain(format!("label {other} is not -1 or +1"))),
        }
    }

    /// Positive only for strictly positive scores; zero goes to the negative class.
    pub fn from_score(score: f64) -> Self {
        if score > 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        Label::from_i8(v).map_err(serde::de::Error::custom)
    }
}

/// Weight model ⟨Culture, Gold, Growth, Military, Religion, Science⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PreferenceVector {
    pub culture: Level,
    pub gold: Level,
    pub growth: Level,
    pub military: Level,
    pub religion: Level,
    pub science: Level,
}

impl PreferenceVector {
    /// Builds a vector from raw levels in canonical slot order.
    pub fn from_levels(levels: [u8; 6]) -> Result<Self> {
        Ok(PreferenceVector {
            culture: Level::from_value(levels[0])?,
            gold: Level::from_value(levels[1])?,
            growth: Level::from_value(levels[2])?,
            military: Level::from_value(levels[3])?,
            religion: Level::from_value(levels[4])?,
            science: Level::from_value(levels[5])?,
        })
    }

    pub fn levels(&self) -> [u8; 6] {
        Preference::ALL.map(|p| self.get(p).value())
    }

    pub fn get(&self, pref: Preference) -> Level {
        match pref {
            Preference::Culture => self.culture,
            Preference::Gold => self.gold,
            Preference::Growth => self.growth,
            Preference::Military => self.military,
            Preference::Religion => self.religion,
            Preference::Science => self.science,
        }
    }

    pub fn set(&mut self, pref: Preference, level: Level) {
        match pref {
            Preference::Culture => self.culture = level,
            Preference::Gold => self.gold = level,
            Preference::Growth => self.growth = level,
            Preference::Military => self.military = level,
            Preference::Religion => self.religion = level,
            Preference::Science => self.science = level,
        }
    }

    pub fn label(&self, pref: Preference) -> Label {
        self.get(pref).label()
    }

    /// The preference with the highest level; ties go to the earlier slot.
    /// `None` when every slot is zero.
    pub fn dominant(&self) -> Option<Preference> {
        let mut best: Option<(Preference, Level)> = None;
        for p in Preference::ALL {
            let l = self.get(p);
            if l > Level::None && best.is_none_or(|(_, b)| l > b) {
                best = Some((p, l));
            }
        }
        best.map(|(p, _)| p)
    }
}

impl fmt::Display for PreferenceVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = self.levels();
        write!(f, "<{}, {}, {}, {}, {}, {}>", l[0], l[1], l[2], l[3], l[4], l[5])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binarize_levels() {
        assert_eq!(binarize_label(0).unwrap(), Label::Negative);
        assert_eq!(binarize_label(2).unwrap(), Label::Positive);
        assert_eq!(binarize_label(5).unwrap(), Label::Positive);
        assert!(matches!(binarize_label(3), Err(Error::Domain(_))));
    }

    #[test]
    fn vector_round_trips_levels() {
        let pm = PreferenceVector::from_levels([0, 0, 2, 5, 0, 0]).unwrap();
        assert_eq!(pm.levels(), [0, 0, 2, 5, 0, 0]);
        assert_eq!(pm.military, Level::Strong);
        assert_eq!(pm.dominant(), Some(Preference::Military));
        assert_eq!(alloc::format!("{pm}"), "<0, 0, 2, 5, 0, 0>");
        assert!(PreferenceVector::from_levels([0, 1, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn zero_score_is_negative() {
        assert_eq!(Label::from_score(0.0), Label::Negative);
        assert_eq!(Label::from_score(1e-300), Label::Positive);
    }

    #[test]
    fn preference_parses_case_insensitively() {
        assert_eq!("Culture".parse::<Preference>().unwrap(), Preference::Culture);
        assert!("wealth".parse::<Preference>().is_err());
    }
}
