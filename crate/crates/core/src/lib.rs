//! Preference modeling from turn-level strategy-game telemetry.
//!
//! The crate covers the whole modeling pipeline without touching the file
//! system: match logs and their validation ([`telemetry`]), composite feature
//! expansion ([`featurize`]), match-granular sampling and fold construction
//! ([`sampling`]), four binary classifier families ([`learners`]), exponential
//! grid search ([`tuning`]), cross-validated reporting ([`evaluation`]), the
//! regression toolkit used to characterize indicators ([`characterize`]) and a
//! preference-driven match generator ([`simulator`]).
//!
//! It is `no_std` and only needs `alloc`. Parsing, serialization to disk,
//! parallel execution and the command line live in the `prefmodel` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod characterize;
pub mod dataset;
mod error;
pub mod evaluation;
pub mod featurize;
pub mod learners;
pub mod preference;
pub mod rng;
pub mod sampling;
pub mod simulator;
pub mod stats;
pub mod telemetry;
pub mod tuning;

pub use crate::dataset::Dataset;
pub use crate::error::{Error, Result};
pub use crate::featurize::{FeatureRegistry, Instance, Mode};
pub use crate::learners::{LearnerSpec, TrainedModel};
pub use crate::preference::{Label, Level, Preference, PreferenceVector};
pub use crate::telemetry::{Indicator, MatchLog, Outcome, TurnRecord, VictoryType};
