use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Metrics, Session, StopReason};
use crate::pattern::{ActorClass, Intervention, Work};
use crate::world::{
    map_hypothesis, BeliefEntry, BeliefState, Hypothesis, InformationQuestion, Label, Sensitivity,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DwellView {
    pub ticks: u32,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternView {
    pub name: String,
    pub state: String,
    pub is_handover: bool,
    pub ticks_in_state: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell: Option<DwellView>,
    /// Command triggers available from the current state.
    pub commands: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSnapshot {
    pub id: String,
    pub label: String,
    pub sensitivity: Sensitivity,
    pub discovered: bool,
    pub authorized: bool,
    pub denied: bool,
    pub pending: bool,
    pub items_remaining: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signal_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemSnapshot {
    pub id: String,
    pub source_id: String,
    pub assigned_class: Label,
    pub assessed_reliability: f64,
    pub processed_by: String,
    pub corrected: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_class: Option<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_reliability: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnprocessedItem {
    pub id: String,
    pub source_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermittedView {
    pub actor: String,
    pub tasks: BTreeMap<String, Work>,
    pub interventions: Vec<Intervention>,
}

/// Serializable view of a session. In live mode every ground-truth field is
/// left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub tick: u64,
    pub finished: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop_reason: Option<StopReason>,
    pub pattern: PatternView,
    pub hypotheses: Vec<Hypothesis>,
    pub belief: BeliefState,
    pub map: BeliefEntry,
    pub sources: Vec<SourceSnapshot>,
    pub items: Vec<ItemSnapshot>,
    pub unprocessed: Vec<UnprocessedItem>,
    pub pending_authorizations: Vec<String>,
    pub questions: Vec<InformationQuestion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permitted: Option<PermittedView>,
    pub metrics: Metrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<String>,
}

impl Session {
    pub fn snapshot(&self) -> Snapshot {
        let live = self.config().live_mode;
        let machine = self.machine();
        let state = machine.current_state();
        let (map_id, map_p) = map_hypothesis(self.belief());
        let status = self.source_status();

        let sources = self
            .scenario()
            .sources
            .iter()
            .map(|s| {
                let taken = status[&s.id].taken;
                SourceSnapshot {
                    id: s.id.clone(),
                    label: s.label.clone(),
                    sensitivity: s.sensitivity,
                    discovered: status[&s.id].discovered,
                    authorized: self.grants().get(&s.id) == Some(&true),
                    denied: self.grants().get(&s.id) == Some(&false),
                    pending: self.pending_authorizations().contains(&s.id),
                    items_remaining: self.scenario().capacity(&s.id).saturating_sub(taken),
                    signal_rate: (!live).then_some(s.signal_rate),
                }
            })
            .collect();

        let items = self
            .items()
            .iter()
            .filter_map(|i| {
                let p = i.processing.as_ref()?;
                Some(ItemSnapshot {
                    id: i.id.clone(),
                    source_id: i.source_id.clone(),
                    assigned_class: p.assigned_class.clone(),
                    assessed_reliability: p.assessed_reliability,
                    processed_by: p.processed_by.clone(),
                    corrected: p.corrected,
                    true_class: (!live).then(|| i.true_class.clone()),
                    true_reliability: (!live).then_some(i.true_reliability),
                })
            })
            .collect();

        let viewer = self.live_human().map(String::from).or_else(|| {
            self.pattern()
                .actors
                .iter()
                .find(|a| a.class == ActorClass::Human)
                .map(|a| a.id.clone())
        });
        let permitted = viewer.map(|actor| {
            let p = self.permissions(&actor);
            let mut tasks = BTreeMap::new();
            for t in &p.indirect {
                tasks.insert(t.clone(), Work::Indirect);
            }
            for t in &p.direct {
                tasks.insert(t.clone(), Work::Direct);
            }
            PermittedView {
                actor,
                tasks,
                interventions: p.interventions.into_iter().collect(),
            }
        });

        let mut metrics = self.metrics().clone();
        if live && !self.is_finished() {
            metrics.correct = None;
        }

        Snapshot {
            tick: self.tick(),
            finished: self.is_finished(),
            stop_reason: self.stop_reason(),
            pattern: PatternView {
                name: self.pattern().name.clone(),
                state: state.name.clone(),
                is_handover: state.is_handover,
                ticks_in_state: machine.ticks_in_state(),
                dwell: state.dwell.as_ref().map(|d| DwellView {
                    ticks: d.ticks,
                    target: d.target.clone(),
                }),
                commands: machine.available_commands(),
            },
            hypotheses: self.scenario().hypotheses.clone(),
            belief: self.belief().clone(),
            map: BeliefEntry {
                hypothesis: map_id,
                probability: map_p,
            },
            sources,
            items,
            unprocessed: self
                .items()
                .iter()
                .filter(|i| i.processing.is_none())
                .map(|i| UnprocessedItem {
                    id: i.id.clone(),
                    source_id: i.source_id.clone(),
                })
                .collect(),
            pending_authorizations: self.pending_authorizations().iter().cloned().collect(),
            questions: self.questions().to_vec(),
            permitted,
            metrics,
            ground_truth: (!live).then(|| self.scenario().ground_truth.clone()),
        }
    }
}
