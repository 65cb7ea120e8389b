//! The session: a deterministic discrete-tick loop binding a pattern machine,
//! a scenario and the team's actors.

pub mod audit;
mod event;
mod metrics;
mod replay;
mod session;
mod snapshot;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{AgentProfile, SimHumanProfile};
use crate::pattern::{ActorClass, Pattern, PatternError};
use crate::world::WorldError;

pub use event::{from_jsonl, to_jsonl, EventOutcome, OutcomeStatus, SimEvent, SYSTEM};
pub use metrics::{Metrics, Outcome, Workload};
pub use replay::{replay, verify_replay, ReplayInputs};
pub use session::{Ack, ScheduledAction, Session, StopReason};
pub use snapshot::{
    DwellView, ItemSnapshot, PatternView, PermittedView, Snapshot, SourceSnapshot,
    UnprocessedItem,
};

/// How a pattern actor is played.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorBinding {
    Agent(AgentProfile),
    SimHuman(SimHumanProfile),
    LiveHuman,
}

impl ActorBinding {
    pub fn class(&self) -> ActorClass {
        match self {
            ActorBinding::Agent(_) => ActorClass::Agent,
            ActorBinding::SimHuman(_) | ActorBinding::LiveHuman => ActorClass::Human,
        }
    }
}

pub type Bindings = BTreeMap<String, ActorBinding>;

/// Default profiles for every actor the pattern declares.
pub fn default_bindings(p: &Pattern) -> Bindings {
    p.actors
        .iter()
        .map(|a| {
            let b = match a.class {
                ActorClass::Agent => ActorBinding::Agent(AgentProfile::default()),
                ActorClass::Human => ActorBinding::SimHuman(SimHumanProfile::default()),
            };
            (a.id.clone(), b)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub max_ticks: u64,
    pub live_mode: bool,
    /// Seeds the session generator (sampling, processing noise, planners).
    pub seed: u64,
}

impl SessionConfig {
    pub const DEFAULT_MAX_TICKS: u64 = 1000;

    pub fn batch(seed: u64) -> Self {
        Self {
            max_ticks: Self::DEFAULT_MAX_TICKS,
            live_mode: false,
            seed,
        }
    }

    pub fn live(seed: u64) -> Self {
        Self {
            live_mode: true,
            ..Self::batch(seed)
        }
    }

    pub fn with_max_ticks(mut self, max_ticks: u64) -> Self {
        self.max_ticks = max_ticks;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Scenario(#[from] WorldError),
    #[error("actor `{0}` is not bound, or the binding names an actor the pattern does not declare")]
    UnboundActor(String),
    #[error("binding for `{actor}` does not match its declared class")]
    BindingMismatch { actor: String },
    #[error("invalid profile for `{actor}`: {message}")]
    InvalidProfile { actor: String, message: String },
    #[error("at most one live human may be bound")]
    DuplicateLiveHuman,
    #[error("live-mode session requires exactly one live human")]
    NoLiveHuman,
    #[error("session has finished")]
    SessionFinished,
    #[error("session is not in live mode")]
    NotLiveMode,
    #[error("`{0}` is not the live human of this session")]
    NotLiveHuman(String),
    #[error("replay diverged at line {line}")]
    ReplayDivergence { line: usize },
}
