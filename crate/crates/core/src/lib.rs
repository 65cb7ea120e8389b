//! Deterministic human-agent teaming simulator for collaborative intelligence
//! analysis.
//!
//! * [`pattern`]: team design pattern language, linter and executable machine.
//! * [`world`]: synthetic scenarios and the hypothesis belief engine.
//! * [`agents`]: planners for information agents and the simulated analyst.
//! * [`engine`]: the tick-driven session, its log, metrics and snapshots.
//! * [`harness`]: batch experiments, CSV output and baselines.
//! * [`protocol`]: wire types for the session service.

pub mod agents;
pub mod engine;
pub mod harness;
pub mod pattern;
pub mod protocol;
pub mod rng;
pub mod world;
