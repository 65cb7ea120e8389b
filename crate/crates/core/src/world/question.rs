use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Scenario, SourceStatus};

/// A follow-up question raised once processing concentrates on a hypothesis;
/// it opens the sources linked to that hypothesis for the next cycle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformationQuestion {
    pub hypothesis: String,
    pub raised_at_tick: u64,
    pub unlocked_sources: Vec<String>,
}

/// Raises the question for `hypothesis` when its tally of processed supporting
/// items has reached `q_threshold`, no question was raised for it before, and
/// it has linked sources still undiscovered. Marks those sources discovered.
pub fn maybe_raise_question(
    scenario: &Scenario,
    status: &mut BTreeMap<String, SourceStatus>,
    raised: &[InformationQuestion],
    hypothesis: &str,
    tally: u32,
    tick: u64,
) -> Option<InformationQuestion> {
    if tally < scenario.generator.q_threshold || raised.iter().any(|q| q.hypothesis == hypothesis) {
        return None;
    }
    let unlocked: Vec<String> = scenario
        .sources
        .iter()
        .filter(|s| s.linked_question.as_deref() == Some(hypothesis))
        .filter(|s| status.get(&s.id).is_some_and(|st| !st.discovered))
        .map(|s| s.id.clone())
        .collect();
    if unlocked.is_empty() {
        return None;
    }
    for id in &unlocked {
        if let Some(st) = status.get_mut(id) {
            st.discovered = true;
        }
    }
    Some(InformationQuestion {
        hypothesis: hypothesis.into(),
        raised_at_tick: tick,
        unlocked_sources: unlocked,
    })
}
