//! Team design patterns: a small textual language describing which actors may
//! do which work in which phase, plus the linter and executable machine.

mod lexer;
mod lint;
mod machine;
mod parser;
pub mod presets;
pub mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lint::{validate_pattern, Finding, LintConfig, LintReport, Location, Rule, Severity};
pub use machine::{compile, compile_with, FireResult, PatternMachine};
pub use parser::parse_pattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorClass {
    Human,
    Agent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActorDecl {
    pub id: String,
    pub class: ActorClass,
}

/// Direct work advances the task; indirect work (monitoring) supports the team
/// without advancing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Work {
    Direct,
    Indirect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Intervention {
    Correct,
    Guide,
    Authorize,
}

impl Intervention {
    pub const ALL: [Intervention; 3] = [Self::Correct, Self::Guide, Self::Authorize];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Correct => "correct",
            Self::Guide => "guide",
            Self::Authorize => "authorize",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.as_str() == name)
    }
}

/// Source position (1-based line and column).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Allocation {
    pub actor: String,
    pub task: String,
    pub work: Work,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dwell {
    pub ticks: u32,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternState {
    pub name: String,
    pub is_handover: bool,
    pub allocations: Vec<Allocation>,
    pub interventions: BTreeMap<String, BTreeSet<Intervention>>,
    pub dwell: Option<Dwell>,
    pub span: Span,
}

impl PatternState {
    pub fn work_of(&self, actor: &str, task: &str) -> Option<Work> {
        self.allocations
            .iter()
            .find(|a| a.actor == actor && a.task == task)
            .map(|a| a.work)
    }

    /// Actors holding direct work on `task` in this state.
    pub fn direct_performers(&self, task: &str) -> BTreeSet<&str> {
        self.allocations
            .iter()
            .filter(|a| a.task == task && a.work == Work::Direct)
            .map(|a| a.actor.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriggerKind {
    Command,
    Request,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Trigger {
    pub kind: TriggerKind,
    pub name: String,
}

impl Trigger {
    pub fn command(name: impl Into<String>) -> Self {
        Self {
            kind: TriggerKind::Command,
            name: name.into(),
        }
    }

    pub fn request(name: impl Into<String>) -> Self {
        Self {
            kind: TriggerKind::Request,
            name: name.into(),
        }
    }
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            TriggerKind::Command => "command",
            TriggerKind::Request => "request",
        };
        write!(f, "{kind}(\"{}\")", self.name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub from: String,
    pub to: String,
    pub trigger: Trigger,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub name: String,
    pub actors: Vec<ActorDecl>,
    pub tasks: Vec<String>,
    pub states: Vec<PatternState>,
    pub transitions: Vec<Transition>,
    /// Every `initial` declaration in source order. Well-formed patterns have
    /// exactly one; the linter reports anything else.
    pub initial_decls: Vec<String>,
}

impl Pattern {
    pub fn initial(&self) -> Option<&str> {
        self.initial_decls.first().map(String::as_str)
    }

    pub fn state(&self, name: &str) -> Option<&PatternState> {
        self.states.iter().find(|s| s.name == name)
    }

    pub fn actor(&self, id: &str) -> Option<&ActorDecl> {
        self.actors.iter().find(|a| a.id == id)
    }

    pub fn has_task(&self, task: &str) -> bool {
        self.tasks.iter().any(|t| t == task)
    }

    pub fn humans(&self) -> impl Iterator<Item = &ActorDecl> {
        self.actors.iter().filter(|a| a.class == ActorClass::Human)
    }

    /// Outgoing edges of `state`: explicit transitions plus the dwell edge.
    pub fn successors<'a>(&'a self, state: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        let dwell = self
            .state(state)
            .and_then(|s| s.dwell.as_ref())
            .map(|d| d.target.as_str());
        self.transitions
            .iter()
            .filter(move |t| t.from == state)
            .map(|t| t.to.as_str())
            .chain(dwell)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("duplicate {kind} `{name}`")]
    DuplicateName { kind: String, name: String },
    #[error("unknown {kind} `{name}`")]
    UnknownReference { kind: String, name: String },
    #[error("duplicate trigger {trigger} leaving state `{state}`")]
    DuplicateTrigger { state: String, trigger: String },
    #[error("pattern has lint errors:\n{0}")]
    LintFailure(LintReport),
}

impl PatternError {
    pub(crate) fn unknown(kind: &str, name: &str) -> Self {
        Self::UnknownReference {
            kind: kind.to_string(),
            name: name.to_string(),
        }
    }

    pub(crate) fn duplicate(kind: &str, name: &str) -> Self {
        Self::DuplicateName {
            kind: kind.to_string(),
            name: name.to_string(),
        }
    }
}
