//! File formats, parallel runners and the command line around
//! [`prefmodel_core`].
//!
//! Match logs are stored one per CSV file with a JSON sidecar ([`logs`]);
//! feature matrices, grid reports, evaluation reports and characterization
//! tables are written by [`formats`]. [`runner`] spreads folds and grid
//! cells over a thread pool without changing results.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod logs;
pub mod pipeline;
pub mod runner;

pub use error::{Error, Result};
