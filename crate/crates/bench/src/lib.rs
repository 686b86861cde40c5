//! Experiment harness for the `rdfdist` workbench: synthetic data,
//! per-strategy pipelines, metrics and reports.

pub mod bench;
pub mod config;
pub mod corpus;
pub mod generator;
pub mod metrics;
pub mod pipeline;
pub mod report;
