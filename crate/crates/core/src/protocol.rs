//! JSON bodies and stream frames exchanged between the session service and
//! its clients.

use serde::{Deserialize, Serialize};

use crate::agents::Action;
use crate::engine::{Bindings, SimEvent, Snapshot};
use crate::pattern::Finding;
use crate::world::{Scenario, ScenarioConfig};

/// Scenario by name (looked up in the server's scenario directory), as a
/// generator config, or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSource {
    Named(String),
    Generate { generate: ScenarioConfig },
    Inline(Box<Scenario>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreateSessionRequest {
    pub scenario: ScenarioSource,
    /// Preset name, or pattern source text.
    pub pattern: String,
    #[serde(default)]
    pub bindings: Bindings,
    #[serde(default)]
    pub seed: u64,
    /// Logical tick cadence; 0 means the client steps explicitly.
    #[serde(default)]
    pub tick_interval_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ticks: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Running,
    Finished,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionHandle {
    pub session_id: String,
    pub created_at: String,
    pub status: SessionStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub status: SessionStatus,
    #[serde(flatten)]
    pub snapshot: Snapshot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionAck {
    pub accepted: bool,
    /// False for commands, which take effect immediately.
    pub queued: bool,
    pub tick: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub findings: Vec<Finding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternPreset {
    pub name: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerFrame {
    Events { tick: u64, events: Vec<SimEvent> },
    Snapshot(Box<SessionView>),
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientFrame {
    Action(Action),
    Step {
        #[serde(default = "one")]
        ticks: u64,
    },
}

fn one() -> u64 {
    1
}
