use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::world::Label;

/// Actor name used for engine-generated events.
pub const SYSTEM: &str = "system";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeStatus {
    Executed,
    Rejected,
    Info,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventOutcome {
    pub status: OutcomeStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub violation: bool,
}

impl EventOutcome {
    pub fn info() -> Self {
        Self::with(OutcomeStatus::Info)
    }

    pub fn executed() -> Self {
        Self::with(OutcomeStatus::Executed)
    }

    pub fn rejected(reason: impl Into<String>) -> Self {
        Self {
            reason: Some(reason.into()),
            ..Self::with(OutcomeStatus::Rejected)
        }
    }

    fn with(status: OutcomeStatus) -> Self {
        Self {
            status,
            reason: None,
            item: None,
            class: None,
            state: None,
            violation: false,
        }
    }
}

/// One entry of the append-only session log. Field order is the
/// serialization order; payload maps serialize with sorted keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimEvent {
    pub tick: u64,
    pub seq: u32,
    pub actor: String,
    pub kind: String,
    pub payload: Value,
    pub outcome: EventOutcome,
}

impl SimEvent {
    pub fn is_executed_action(&self) -> bool {
        self.actor != SYSTEM && self.outcome.status == OutcomeStatus::Executed
    }
}

/// Serializes events as JSON lines, one event per line, LF-terminated.
pub fn to_jsonl(events: &[SimEvent]) -> String {
    let mut out = String::new();
    for e in events {
        out.push_str(&serde_json::to_string(e).expect("events always serialize"));
        out.push('\n');
    }
    out
}

pub fn from_jsonl(text: &str) -> Result<Vec<SimEvent>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
