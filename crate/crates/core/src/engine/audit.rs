//! Log audits that reconstruct pattern state and grants from the event log
//! alone, independently of the engine's own checks.

use std::collections::BTreeMap;

use super::{OutcomeStatus, SimEvent, SYSTEM};
use crate::pattern::{Intervention, Pattern, Work};
use crate::world::{Scenario, Sensitivity};

/// An executed action the pattern state at that point did not allow.
#[derive(Debug, Clone, PartialEq)]
pub struct Unpermitted {
    pub tick: u64,
    pub seq: u32,
    pub actor: String,
    pub kind: String,
    pub state: String,
}

fn required(kind: &str) -> (Option<&'static str>, Option<Intervention>) {
    match kind {
        "direct_srcs" => (Some("direct_srcs"), None),
        "collect" | "request_authorization" => (Some("collect"), None),
        "process" => (Some("process"), None),
        "correct" => (None, Some(Intervention::Correct)),
        "guide" => (None, Some(Intervention::Guide)),
        "authorize" => (None, Some(Intervention::Authorize)),
        _ => (None, None),
    }
}

/// Replays `state_change` events from the initial state and checks every
/// executed action against the allocation table of the state it ran in.
pub fn unpermitted_actions(pattern: &Pattern, log: &[SimEvent]) -> Vec<Unpermitted> {
    let mut state = pattern.initial().unwrap_or_default().to_string();
    let mut out = Vec::new();
    for e in log {
        if e.actor == SYSTEM {
            if e.kind == "state_change" {
                if let Some(to) = e.payload.get("to").and_then(|v| v.as_str()) {
                    state = to.to_string();
                }
            }
            continue;
        }
        if e.outcome.status == OutcomeStatus::Executed {
            let Some(st) = pattern.state(&state) else {
                continue;
            };
            let (task, iv) = required(&e.kind);
            let ok_task = task.is_none_or(|t| st.work_of(&e.actor, t) == Some(Work::Direct));
            let ok_iv = iv.is_none_or(|iv| {
                st.interventions
                    .get(&e.actor)
                    .is_some_and(|set| set.contains(&iv))
            });
            if !(ok_task && ok_iv) {
                out.push(Unpermitted {
                    tick: e.tick,
                    seq: e.seq,
                    actor: e.actor.clone(),
                    kind: e.kind.clone(),
                    state: state.clone(),
                });
            }
        }
        // commands are logged before the transition they cause, so the
        // following state_change event updates `state`
    }
    out
}

/// Counts executed collects of sensitive sources with no standing grant,
/// reconstructing grants from executed `authorize` events.
pub fn count_violations(scenario: &Scenario, log: &[SimEvent]) -> u32 {
    let mut grants: BTreeMap<String, bool> = BTreeMap::new();
    let mut n = 0;
    for e in log.iter().filter(|e| e.is_executed_action()) {
        let source = e.payload.get("source").and_then(|v| v.as_str());
        match (e.kind.as_str(), source) {
            ("authorize", Some(s)) => {
                let grant = e.payload.get("grant").and_then(|v| v.as_bool()) == Some(true);
                grants.insert(s.to_string(), grant);
            }
            ("collect", Some(s)) => {
                let sensitive = scenario.source(s).map(|x| x.sensitivity)
                    == Some(Sensitivity::Sensitive);
                if sensitive && grants.get(s) != Some(&true) {
                    n += 1;
                }
            }
            _ => {}
        }
    }
    n
}
