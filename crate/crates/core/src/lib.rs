//! Anomaly detection on temporal transaction networks from shifts in
//! centrality rankings.
//!
//! A run aggregates transfers into one directed weighted layer per time
//! interval ([`ingest`], [`graph`]), scores every node with a roster of
//! centralities ([`centrality`]), turns scores into rankings ([`ranking`]),
//! keeps only metrics whose rankings stay correlated over time, and reports
//! the nodes whose position moved most between two intervals
//! ([`detection`]). [`eval`] scores the resulting lists against labels,
//! [`rec`] draws ranking evolution charts, [`synth`] produces test data and
//! [`pipeline`] ties the steps together.

pub mod centrality;
pub mod config;
pub mod detection;
pub mod error;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod ranking;
pub mod rec;
pub mod synth;

pub use error::{Error, Result};
