use serde::{Deserialize, Serialize};

use super::{Bindings, EngineError, ScheduledAction, Session, SessionConfig};
use crate::pattern::Pattern;
use crate::world::Scenario;

/// Everything that determines a session's event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayInputs {
    pub scenario: Scenario,
    pub pattern: Pattern,
    pub bindings: Bindings,
    pub config: SessionConfig,
    #[serde(default)]
    pub schedule: Vec<ScheduledAction>,
    /// Stop stepping once the session reaches this tick (live sessions that
    /// were not run to the end). `None` runs to a stop condition.
    #[serde(default)]
    pub until_tick: Option<u64>,
}

/// Re-runs a session from its inputs and recorded live-action schedule.
pub fn replay(inputs: &ReplayInputs) -> Result<Session, EngineError> {
    let mut s = Session::new(
        inputs.scenario.clone(),
        inputs.pattern.clone(),
        &inputs.bindings,
        inputs.config.clone(),
    )?;
    let mut next = 0;
    let submit_due = |s: &mut Session, next: &mut usize| -> Result<(), EngineError> {
        while let Some(sa) = inputs.schedule.get(*next) {
            if sa.tick != s.tick() || s.is_finished() {
                break;
            }
            s.submit_human_action(sa.action.clone())?;
            *next += 1;
        }
        Ok(())
    };
    loop {
        submit_due(&mut s, &mut next)?;
        if s.is_finished() || inputs.until_tick.is_some_and(|u| s.tick() >= u) {
            break;
        }
        if s.tick() >= s.config().max_ticks {
            break;
        }
        s.step()?;
    }
    Ok(s)
}

/// Replays and compares the serialized log byte-for-byte with `expected`.
pub fn verify_replay(inputs: &ReplayInputs, expected: &str) -> Result<Session, EngineError> {
    let s = replay(inputs)?;
    let actual = s.log_jsonl();
    if actual != expected {
        let line = actual
            .lines()
            .zip(expected.lines())
            .position(|(a, b)| a != b)
            .unwrap_or_else(|| actual.lines().count().min(expected.lines().count()))
            + 1;
        return Err(EngineError::ReplayDivergence { line });
    }
    Ok(s)
}
