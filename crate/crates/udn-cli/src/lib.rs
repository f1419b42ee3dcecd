//! Experiment-runner library behind the `udn` binary: scenario loading,
//! the deterministic parallel engine, sweep orchestration, CSV/manifest
//! reporting, and the acceptance-criteria harness.

pub mod acceptance;
pub mod engine;
pub mod report;
pub mod scenario;
