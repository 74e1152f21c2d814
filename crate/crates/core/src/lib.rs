//! Analytical and Monte Carlo model for choosing between a two-hop mmWave
//! relay and a microwave fallback when the direct mmWave path is blocked.
//!
//! The crate is organised bottom-up:
//!
//! * [`scenario`] holds the validated three-node configuration and its
//!   TOML file format.
//! * [`channel`] turns geometry and antenna settings into gains, noise
//!   powers, SNRs and the beam-training overhead.
//! * [`blockage`] models obstacles on the direct link as an M/M/∞ queue,
//!   both in closed form and with a discrete-event simulator.
//! * [`rates`] computes Shannon and finite-blocklength link rates.
//! * [`analysis`] compares per-slot throughput of the two options.
//! * [`delay`] compares M/D/1 delays and builds decision regions.
//! * [`export`] writes the CSV files consumed by external plotting tools.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod blockage;
pub mod channel;
pub mod delay;
mod error;
pub mod export;
pub mod rates;
pub mod scenario;

pub use analysis::{Choice, DecisionOutcome, ThroughputReport};
pub use blockage::{BlockageStats, PeriodSamples};
pub use delay::{DelayReport, QueueDelay, RegionCell, RegionGrid, RegionLabel};
pub use error::{Error, Result};
pub use rates::{RateModel, RateSet, Regime};
pub use scenario::{AntennaPattern, Band, BandParams, Geometry, ObstacleProcess, ScenarioConfig, TrafficParams};
