//! Throughput-capacity laboratory for wireless networks whose nodes cache
//! content for an exponentially distributed lifetime.
//!
//! The crate builds grid and random-cell topologies, runs path-wise, ring and
//! cell-wise content discovery over steady-state possession snapshots, and
//! compares Monte Carlo estimates of hop counts, server share, per-node load
//! and supported throughput with exact finite-`n` expressions.

pub mod analytics;
pub mod config;
pub mod discovery;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod model;
pub mod montecarlo;
pub mod rng;
pub mod topology;

pub use config::{CellMode, FieldModel, RequesterPolicy, Scenario, ScenarioConfig};
pub use error::{Error, Result};
