use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workload {
    pub direct_actions: u32,
    pub indirect_ticks: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub decided: bool,
    pub ticks_to_decision: Option<u64>,
    pub chosen: Option<String>,
    /// Set when the run stops; hidden from live clients until then.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correct: Option<bool>,
    pub violations: u32,
    pub corrections_issued: u32,
    pub mislabel_rate_final: f64,
    pub workload: BTreeMap<String, Workload>,
    pub sources_accessed: BTreeSet<String>,
}

/// Result of a batch run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub decided: bool,
    /// MAP hypothesis when the run stopped.
    pub chosen: String,
    pub correct: bool,
    pub metrics: Metrics,
}
