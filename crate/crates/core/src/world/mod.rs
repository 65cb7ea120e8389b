//! Synthetic intelligence scenarios and the belief engine that scores
//! hypotheses from processed evidence.

mod belief;
mod question;
mod scenario;

use thiserror::Error;

pub use belief::{decision_reached, lift, map_hypothesis, update_belief, BeliefEntry, BeliefState};
pub use question::{maybe_raise_question, InformationQuestion};
pub use scenario::{
    generate_scenario, sample_item, GeneratorParams, Hypothesis, InfoItem, ItemSpec, Label,
    Processing, Scenario, ScenarioConfig, Sensitivity, Source, SourceStatus,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("source `{0}` is exhausted")]
    SourceExhausted(String),
    #[error("source `{0}` has not been discovered")]
    SourceUndiscovered(String),
    #[error("unknown source `{0}`")]
    UnknownSource(String),
    #[error("unknown hypothesis `{0}`")]
    UnknownHypothesis(String),
}
