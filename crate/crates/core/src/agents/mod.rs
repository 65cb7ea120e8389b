//! Behaviour models for information agents and the simulated analyst.
//!
//! Planners are pure: they read a [`View`] assembled by the engine, draw from
//! the session generator, and return an [`Action`]. All mutation happens in the
//! engine.

mod planner;
mod processing;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::Intervention;
use crate::world::{Label, Sensitivity};

pub use planner::{plan_agent_action, plan_sim_human_action};
pub use processing::{apply_correction, apply_guidance, execute_process, relabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensitivePolicy {
    Access,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AgentProfile {
    /// Ticks per action.
    pub speed: u32,
    pub classification_accuracy: f64,
    pub reliability_noise: f64,
    pub sensitive_policy: SensitivePolicy,
}

impl Default for AgentProfile {
    fn default() -> Self {
        Self {
            speed: 1,
            classification_accuracy: 0.75,
            reliability_noise: 0.15,
            sensitive_policy: SensitivePolicy::Access,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimHumanProfile {
    pub speed: u32,
    pub classification_accuracy: f64,
    pub reliability_noise: f64,
    /// Chance of spotting a given agent mislabel while reviewing.
    pub detection_prob: f64,
    /// Chance of picking the most signal-rich source when directing or guiding.
    pub guidance_skill: f64,
}

impl Default for SimHumanProfile {
    fn default() -> Self {
        Self {
            speed: 8,
            classification_accuracy: 0.95,
            reliability_noise: 0.05,
            detection_prob: 0.8,
            guidance_skill: 0.7,
        }
    }
}

fn check_unit(name: &str, v: f64) -> Result<(), String> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(format!("{name} = {v} is outside [0, 1]"))
    }
}

fn check_noise(v: f64) -> Result<(), String> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err("reliability_noise must be >= 0".into())
    }
}

impl AgentProfile {
    pub fn validate(&self) -> Result<(), String> {
        if self.speed == 0 {
            return Err("speed must be >= 1".into());
        }
        check_unit("classification_accuracy", self.classification_accuracy)?;
        check_noise(self.reliability_noise)?;
        Ok(())
    }
}

impl SimHumanProfile {
    pub fn validate(&self) -> Result<(), String> {
        if self.speed == 0 {
            return Err("speed must be >= 1".into());
        }
        check_unit("classification_accuracy", self.classification_accuracy)?;
        check_unit("detection_prob", self.detection_prob)?;
        check_unit("guidance_skill", self.guidance_skill)?;
        check_noise(self.reliability_noise)?;
        Ok(())
    }
}

/// What an actor does on its turn. Serialized with a `kind` tag; this is also
/// the wire schema for live-human actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionKind {
    DirectSrcs {
        source: String,
    },
    Collect {
        source: String,
    },
    Process {
        item: String,
    },
    RequestAuthorization {
        source: String,
    },
    Correct {
        item: String,
        class: Label,
        /// Reassessed reliability; the previous assessment is kept when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reliability: Option<f64>,
    },
    Guide {
        agent: String,
        source: String,
    },
    Authorize {
        source: String,
        grant: bool,
    },
    Command {
        name: String,
    },
    Idle,
}

impl ActionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ActionKind::DirectSrcs { .. } => "direct_srcs",
            ActionKind::Collect { .. } => "collect",
            ActionKind::Process { .. } => "process",
            ActionKind::RequestAuthorization { .. } => "request_authorization",
            ActionKind::Correct { .. } => "correct",
            ActionKind::Guide { .. } => "guide",
            ActionKind::Authorize { .. } => "authorize",
            ActionKind::Command { .. } => "command",
            ActionKind::Idle => "idle",
        }
    }

    /// The task whose direct allocation this action requires, if any.
    pub fn required_task(&self) -> Option<&'static str> {
        match self {
            ActionKind::DirectSrcs { .. } => Some(tasks::DIRECT_SRCS),
            ActionKind::Collect { .. } | ActionKind::RequestAuthorization { .. } => {
                Some(tasks::COLLECT)
            }
            ActionKind::Process { .. } => Some(tasks::PROCESS),
            _ => None,
        }
    }

    pub fn required_intervention(&self) -> Option<Intervention> {
        match self {
            ActionKind::Correct { .. } => Some(Intervention::Correct),
            ActionKind::Guide { .. } => Some(Intervention::Guide),
            ActionKind::Authorize { .. } => Some(Intervention::Authorize),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub actor: String,
    #[serde(flatten)]
    pub kind: ActionKind,
}

/// Task identifiers of the intelligence cycle, as used by shipped patterns.
pub mod tasks {
    pub const DIRECT_SRCS: &str = "direct_srcs";
    pub const COLLECT: &str = "collect";
    pub const PROCESS: &str = "process";
}

/// What the current pattern state lets one actor do.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permissions {
    pub direct: BTreeSet<String>,
    pub indirect: BTreeSet<String>,
    pub interventions: BTreeSet<Intervention>,
}

impl Permissions {
    pub fn direct_on(&self, task: &str) -> bool {
        self.direct.contains(task)
    }

    pub fn holds(&self, task: &str) -> bool {
        self.direct.contains(task) || self.indirect.contains(task)
    }

    pub fn may(&self, iv: Intervention) -> bool {
        self.interventions.contains(&iv)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceView {
    pub id: String,
    pub sensitivity: Sensitivity,
    pub discovered: bool,
    pub remaining: u32,
    /// `Some(true)` granted, `Some(false)` denied, `None` undecided.
    pub grant: Option<bool>,
    pub pending: bool,
    pub signal_rate: f64,
}

impl SourceView {
    pub fn collectable(&self, policy: SensitivePolicy) -> bool {
        self.discovered
            && self.remaining > 0
            && (self.sensitivity == Sensitivity::Open
                || self.grant == Some(true)
                || policy == SensitivePolicy::Access)
    }
}

/// An item processed by an agent and not yet corrected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewItem {
    pub id: String,
    pub assigned_class: Label,
    pub true_class: Label,
    pub true_reliability: f64,
}

impl ReviewItem {
    pub fn is_mislabeled(&self) -> bool {
        self.assigned_class != self.true_class
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentState {
    pub guided: Option<String>,
    pub last_source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeammateView {
    pub id: String,
    pub state: AgentState,
}

/// The slice of the session an actor plans from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct View {
    pub sources: Vec<SourceView>,
    /// Unprocessed item ids, oldest first.
    pub unprocessed: Vec<String>,
    pub review: Vec<ReviewItem>,
    pub labels: Vec<Label>,
    pub focus: Option<String>,
    /// Whether some human may authorize in the current pattern state.
    pub authority_available: bool,
    pub agents: Vec<TeammateView>,
}

impl View {
    pub fn source(&self, id: &str) -> Option<&SourceView> {
        self.sources.iter().find(|s| s.id == id)
    }

    pub fn collectable(&self, policy: SensitivePolicy) -> impl Iterator<Item = &SourceView> {
        self.sources.iter().filter(move |s| s.collectable(policy))
    }

    fn is_collectable(&self, id: Option<&str>, policy: SensitivePolicy) -> bool {
        id.and_then(|id| self.source(id))
            .is_some_and(|s| s.collectable(policy))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("item `{0}` is already processed")]
    AlreadyProcessed(String),
    #[error("item `{0}` has not been processed")]
    NotProcessed(String),
    #[error("item `{0}` was already corrected")]
    AlreadyCorrected(String),
    #[error("unknown source `{0}`")]
    UnknownSource(String),
    #[error("source `{0}` has not been discovered")]
    UndiscoveredSource(String),
}
