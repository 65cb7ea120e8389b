use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{
    ActorBinding, Bindings, EngineError, EventOutcome, Metrics, Outcome, SessionConfig,
    SimEvent, Workload, SYSTEM,
};
use crate::agents::{
    apply_correction, apply_guidance, execute_process, plan_agent_action,
    plan_sim_human_action, Action, ActionKind, AgentState, Permissions, ReviewItem,
    SimHumanProfile, SourceView, TeammateView, View,
};
use crate::pattern::{
    compile, ActorClass, Intervention, Pattern, PatternMachine, Trigger, Work,
};
use crate::rng::Lcg;
use crate::world::{
    decision_reached, map_hypothesis, maybe_raise_question, sample_item, update_belief,
    BeliefState, InfoItem, InformationQuestion, Label, Scenario, Sensitivity, SourceStatus,
};

/// XORed into the configured seed so session draws do not replay the
/// scenario generator's stream for the same seed.
const SESSION_STREAM: u64 = 0x5851_F42D_4C95_7F2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Decided,
    MaxTicks,
    Exhausted,
}

/// A live-human action as submitted, keyed by the tick it was submitted
/// before. Replaying the schedule reproduces the session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduledAction {
    pub tick: u64,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ack {
    /// True when the action waits for the next step; commands run at once.
    pub queued: bool,
    pub events: Vec<SimEvent>,
}

#[derive(Debug, Clone)]
struct ActorRuntime {
    id: String,
    class: ActorClass,
    binding: ActorBinding,
    next_ready: u64,
    state: AgentState,
}

impl ActorRuntime {
    fn speed(&self) -> u64 {
        match &self.binding {
            ActorBinding::Agent(p) => p.speed as u64,
            ActorBinding::SimHuman(p) => p.speed as u64,
            ActorBinding::LiveHuman => 1,
        }
    }

    /// (accuracy, reliability noise) used when this actor processes an item.
    fn processing_params(&self) -> (f64, f64) {
        match &self.binding {
            ActorBinding::Agent(p) => (p.classification_accuracy, p.reliability_noise),
            ActorBinding::SimHuman(p) => (p.classification_accuracy, p.reliability_noise),
            ActorBinding::LiveHuman => {
                let p = SimHumanProfile::default();
                (p.classification_accuracy, p.reliability_noise)
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Session {
    scenario: Scenario,
    machine: PatternMachine,
    actors: Vec<ActorRuntime>,
    tick: u64,
    seq: u32,
    items: Vec<InfoItem>,
    belief: BeliefState,
    questions: Vec<InformationQuestion>,
    sources: BTreeMap<String, SourceStatus>,
    grants: BTreeMap<String, bool>,
    pending: BTreeSet<String>,
    focus: Option<String>,
    log: Vec<SimEvent>,
    metrics: Metrics,
    rng: Lcg,
    config: SessionConfig,
    stop: Option<StopReason>,
    queued: Option<Action>,
    schedule: Vec<ScheduledAction>,
}

fn payload_of(kind: &ActionKind) -> Value {
    let mut v = serde_json::to_value(kind).expect("actions serialize");
    if let Value::Object(m) = &mut v {
        m.remove("kind");
    }
    v
}

impl Session {
    pub fn new(
        scenario: Scenario,
        pattern: Pattern,
        bindings: &Bindings,
        config: SessionConfig,
    ) -> Result<Self, EngineError> {
        scenario.validate()?;
        let machine = compile(pattern)?;
        let pattern = machine.pattern();

        for id in bindings.keys() {
            if pattern.actor(id).is_none() {
                return Err(EngineError::UnboundActor(id.clone()));
            }
        }
        let mut actors = Vec::new();
        let mut live = 0;
        for decl in &pattern.actors {
            let binding = bindings
                .get(&decl.id)
                .ok_or_else(|| EngineError::UnboundActor(decl.id.clone()))?
                .clone();
            if binding.class() != decl.class {
                return Err(EngineError::BindingMismatch {
                    actor: decl.id.clone(),
                });
            }
            let invalid = match &binding {
                ActorBinding::Agent(p) => p.validate().err(),
                ActorBinding::SimHuman(p) => p.validate().err(),
                ActorBinding::LiveHuman => {
                    live += 1;
                    None
                }
            };
            if let Some(message) = invalid {
                return Err(EngineError::InvalidProfile {
                    actor: decl.id.clone(),
                    message,
                });
            }
            actors.push(ActorRuntime {
                id: decl.id.clone(),
                class: decl.class,
                binding,
                next_ready: 0,
                state: AgentState::default(),
            });
        }
        if live > 1 {
            return Err(EngineError::DuplicateLiveHuman);
        }

        let sources = scenario
            .sources
            .iter()
            .map(|s| {
                (
                    s.id.clone(),
                    SourceStatus {
                        discovered: s.discovered,
                        taken: 0,
                    },
                )
            })
            .collect();
        let metrics = Metrics {
            workload: actors
                .iter()
                .map(|a| (a.id.clone(), Workload::default()))
                .collect(),
            ..Default::default()
        };
        let mut s = Session {
            belief: BeliefState::uniform(scenario.hypothesis_ids()),
            rng: Lcg::new(config.seed ^ SESSION_STREAM),
            scenario,
            machine,
            actors,
            tick: 0,
            seq: 0,
            items: Vec::new(),
            questions: Vec::new(),
            sources,
            grants: BTreeMap::new(),
            pending: BTreeSet::new(),
            focus: None,
            log: Vec::new(),
            metrics,
            config,
            stop: None,
            queued: None,
            schedule: Vec::new(),
        };
        // A degenerate scenario can be decided before anything happens.
        if decision_reached(&s.belief, s.scenario.generator.tau) {
            s.record_decision();
        }
        Ok(s)
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn machine(&self) -> &PatternMachine {
        &self.machine
    }

    pub fn pattern(&self) -> &Pattern {
        self.machine.pattern()
    }

    pub fn tick(&self) -> u64 {
        self.tick
    }

    pub fn items(&self) -> &[InfoItem] {
        &self.items
    }

    pub fn belief(&self) -> &BeliefState {
        &self.belief
    }

    pub fn questions(&self) -> &[InformationQuestion] {
        &self.questions
    }

    pub fn log(&self) -> &[SimEvent] {
        &self.log
    }

    pub fn metrics(&self) -> &Metrics {
        &self.metrics
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn schedule(&self) -> &[ScheduledAction] {
        &self.schedule
    }

    pub fn queued(&self) -> Option<&Action> {
        self.queued.as_ref()
    }

    pub fn pending_authorizations(&self) -> &BTreeSet<String> {
        &self.pending
    }

    pub fn grants(&self) -> &BTreeMap<String, bool> {
        &self.grants
    }

    pub fn source_status(&self) -> &BTreeMap<String, SourceStatus> {
        &self.sources
    }

    pub fn focus(&self) -> Option<&str> {
        self.focus.as_deref()
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.stop
    }

    pub fn is_finished(&self) -> bool {
        self.stop.is_some()
    }

    pub fn log_jsonl(&self) -> String {
        super::to_jsonl(&self.log)
    }

    pub fn live_human(&self) -> Option<&str> {
        self.actors
            .iter()
            .find(|a| matches!(a.binding, ActorBinding::LiveHuman))
            .map(|a| a.id.as_str())
    }

    pub fn agent_state(&self, actor: &str) -> Option<&AgentState> {
        self.actors.iter().find(|a| a.id == actor).map(|a| &a.state)
    }

    /// Permissions of `actor` in the current pattern state.
    pub fn permissions(&self, actor: &str) -> Permissions {
        let state = self.machine.current_state();
        let mut p = Permissions::default();
        for a in state.allocations.iter().filter(|a| a.actor == actor) {
            match a.work {
                Work::Direct => p.direct.insert(a.task.clone()),
                Work::Indirect => p.indirect.insert(a.task.clone()),
            };
        }
        p.interventions = state.interventions.get(actor).cloned().unwrap_or_default();
        p
    }

    fn remaining(&self, source: &str) -> u32 {
        let taken = self.sources.get(source).map_or(0, |s| s.taken);
        self.scenario.capacity(source).saturating_sub(taken)
    }

    fn source_views(&self) -> Vec<SourceView> {
        self.scenario
            .sources
            .iter()
            .map(|s| SourceView {
                id: s.id.clone(),
                sensitivity: s.sensitivity,
                discovered: self.sources[&s.id].discovered,
                remaining: self.remaining(&s.id),
                grant: self.grants.get(&s.id).copied(),
                pending: self.pending.contains(&s.id),
                signal_rate: s.signal_rate,
            })
            .collect()
    }

    fn class_of(&self, actor: &str) -> Option<ActorClass> {
        self.actors.iter().find(|a| a.id == actor).map(|a| a.class)
    }

    fn view(&self) -> View {
        let state = self.machine.current_state();
        let authority_available = self.actors.iter().any(|a| {
            a.class == ActorClass::Human
                && state
                    .interventions
                    .get(&a.id)
                    .is_some_and(|s| s.contains(&Intervention::Authorize))
        });
        View {
            sources: self.source_views(),
            unprocessed: self
                .items
                .iter()
                .filter(|i| i.processing.is_none())
                .map(|i| i.id.clone())
                .collect(),
            review: self
                .items
                .iter()
                .filter_map(|i| {
                    let p = i.processing.as_ref()?;
                    (!p.corrected && self.class_of(&p.processed_by) == Some(ActorClass::Agent))
                        .then(|| ReviewItem {
                            id: i.id.clone(),
                            assigned_class: p.assigned_class.clone(),
                            true_class: i.true_class.clone(),
                            true_reliability: i.true_reliability,
                        })
                })
                .collect(),
            labels: self.scenario.labels(),
            focus: self.focus.clone(),
            authority_available,
            agents: self
                .actors
                .iter()
                .filter(|a| a.class == ActorClass::Agent)
                .map(|a| TeammateView {
                    id: a.id.clone(),
                    state: a.state.clone(),
                })
                .collect(),
        }
    }

    fn emit(&mut self, actor: &str, kind: &str, payload: Value, outcome: EventOutcome) {
        let e = SimEvent {
            tick: self.tick,
            seq: self.seq,
            actor: actor.into(),
            kind: kind.into(),
            payload,
            outcome,
        };
        self.seq += 1;
        self.log.push(e);
    }

    fn note_transition(&mut self, from: &str, to: &str, cause: Value) {
        let mut outcome = EventOutcome::info();
        outcome.state = Some(to.into());
        self.emit(
            SYSTEM,
            "state_change",
            json!({ "from": from, "to": to, "cause": cause }),
            outcome,
        );
    }

    /// Checks the pattern permits `actor` to take `kind` now.
    fn authorize_action(&self, actor: &str, kind: &ActionKind) -> Result<(), String> {
        let state = self.machine.current();
        let denied = |what: String| format!("PermissionDenied: {what} in state `{state}`");
        if let ActionKind::Command { .. } = kind {
            return match self.class_of(actor) {
                Some(ActorClass::Human) => Ok(()),
                _ => Err(denied(format!("`{actor}` may not issue commands"))),
            };
        }
        if let Some(task) = kind.required_task() {
            let work = self.machine.permitted_work(actor, task).ok().flatten();
            if work != Some(Work::Direct) {
                return Err(denied(format!("`{actor}` holds no direct `{task}` allocation")));
            }
        }
        if let Some(iv) = kind.required_intervention() {
            let ok = self
                .machine
                .permitted_interventions(actor)
                .map(|s| s.contains(&iv))
                .unwrap_or(false);
            if !ok {
                return Err(denied(format!("`{actor}` may not {}", iv.as_str())));
            }
        }
        Ok(())
    }

    /// Applies `action` after its permission check; returns the outcome to log.
    fn apply(&mut self, idx: usize, kind: &ActionKind) -> Result<EventOutcome, String> {
        let actor = self.actors[idx].id.clone();
        self.authorize_action(&actor, kind)?;
        let mut outcome = EventOutcome::executed();
        match kind {
            ActionKind::Idle => {}
            ActionKind::DirectSrcs { source } => {
                let st = self
                    .sources
                    .get(source)
                    .ok_or_else(|| format!("unknown source `{source}`"))?;
                if !st.discovered {
                    return Err(format!("source `{source}` has not been discovered"));
                }
                self.focus = Some(source.clone());
            }
            ActionKind::Collect { source } => {
                let item = sample_item(&self.scenario, source, &mut self.sources, &mut self.rng)
                    .map_err(|e| e.to_string())?;
                let sensitive = self.scenario.source(source).map(|s| s.sensitivity)
                    == Some(Sensitivity::Sensitive);
                if sensitive && self.grants.get(source) != Some(&true) {
                    outcome.violation = true;
                    self.metrics.violations += 1;
                }
                self.metrics.sources_accessed.insert(source.clone());
                outcome.item = Some(item.id.clone());
                self.items.push(item);
                let st = &mut self.actors[idx].state;
                st.last_source = Some(source.clone());
                if st.guided.as_deref() == Some(source.as_str()) && self.remaining(source) == 0 {
                    self.actors[idx].state.guided = None;
                }
            }
            ActionKind::Process { item } => {
                let pos = self
                    .items
                    .iter()
                    .position(|i| &i.id == item)
                    .ok_or_else(|| format!("unknown item `{item}`"))?;
                let (accuracy, noise) = self.actors[idx].processing_params();
                let labels = self.scenario.labels();
                let record =
                    execute_process(&self.items[pos], &labels, accuracy, noise, &actor, &mut self.rng)
                        .map_err(|e| e.to_string())?;
                outcome.item = Some(item.clone());
                outcome.class = Some(record.assigned_class.clone());
                self.items[pos].processing = Some(record);
            }
            ActionKind::Correct {
                item,
                class,
                reliability,
            } => {
                if let Label::Hypothesis(h) = class {
                    if !self.scenario.has_hypothesis(h) {
                        return Err(format!("unknown hypothesis `{h}`"));
                    }
                }
                let pos = self
                    .items
                    .iter()
                    .position(|i| &i.id == item)
                    .ok_or_else(|| format!("unknown item `{item}`"))?;
                apply_correction(&mut self.items[pos], class.clone(), *reliability)
                    .map_err(|e| e.to_string())?;
                self.metrics.corrections_issued += 1;
                outcome.item = Some(item.clone());
                outcome.class = Some(class.clone());
            }
            ActionKind::Guide { agent, source } => {
                let target = self
                    .actors
                    .iter()
                    .position(|a| &a.id == agent && a.class == ActorClass::Agent)
                    .ok_or_else(|| format!("`{agent}` is not an agent of this team"))?;
                let views = self.source_views();
                apply_guidance(&mut self.actors[target].state, source, &views)
                    .map_err(|e| e.to_string())?;
            }
            ActionKind::Authorize { source, grant } => {
                match self.scenario.source(source) {
                    None => return Err(format!("unknown source `{source}`")),
                    Some(s) if s.sensitivity != Sensitivity::Sensitive => {
                        return Err(format!("source `{source}` is not sensitive"))
                    }
                    Some(_) => {}
                }
                self.grants.insert(source.clone(), *grant);
                self.pending.remove(source);
            }
            ActionKind::RequestAuthorization { source } => {
                let sensitive = self.scenario.source(source).map(|s| s.sensitivity);
                if sensitive != Some(Sensitivity::Sensitive) {
                    return Err(format!("source `{source}` is not a sensitive source"));
                }
                if self.grants.contains_key(source) || self.pending.contains(source) {
                    return Err(format!("authorization for `{source}` already requested or decided"));
                }
                self.pending.insert(source.clone());
            }
            ActionKind::Command { .. } => {}
        }
        if kind.required_task().is_some() {
            if let Some(w) = self.metrics.workload.get_mut(&actor) {
                w.direct_actions += 1;
            }
        }
        Ok(outcome)
    }

    /// Executes and logs one action; returns whether it was executed.
    fn execute(&mut self, idx: usize, action: &Action) -> bool {
        let actor = self.actors[idx].id.clone();
        let payload = payload_of(&action.kind);
        let kind = action.kind.name();
        match self.apply(idx, &action.kind) {
            Ok(mut outcome) => {
                // Commands and authorization requests drive the pattern; the
                // action is logged before the transition it causes.
                let trigger = match &action.kind {
                    ActionKind::Command { name } => Some(Trigger::command(name.clone())),
                    ActionKind::RequestAuthorization { .. } => Some(Trigger::request("authorize")),
                    _ => None,
                };
                let from = self.machine.current().to_string();
                let fired = trigger.map(|t| (self.machine.fire(&t), t));
                if let (ActionKind::Command { .. }, Some((r, _))) = (&action.kind, &fired) {
                    outcome.state = Some(r.new_state.clone());
                }
                self.emit(&actor, kind, payload, outcome);
                if let Some((r, t)) = fired.filter(|(r, _)| r.changed) {
                    let cause = serde_json::to_value(&t).expect("triggers serialize");
                    self.note_transition(&from, &r.new_state, cause);
                }
                if matches!(
                    action.kind,
                    ActionKind::Process { .. } | ActionKind::Correct { .. }
                ) {
                    self.refresh_evidence();
                }
                true
            }
            Err(reason) => {
                self.emit(&actor, kind, payload, EventOutcome::rejected(reason));
                false
            }
        }
    }

    /// Posterior from a fold over every current processing record, in
    /// collection order.
    pub fn recompute_belief(&self) -> BeliefState {
        let lambda = self.scenario.generator.lambda;
        self.items
            .iter()
            .filter_map(|i| i.processing.as_ref())
            .fold(BeliefState::uniform(self.scenario.hypothesis_ids()), |b, p| {
                update_belief(&b, &p.assigned_class, p.assessed_reliability, lambda)
                    .expect("assigned classes are validated labels")
            })
    }

    fn refresh_evidence(&mut self) {
        self.belief = self.recompute_belief();
        let mut tallies: BTreeMap<String, u32> = BTreeMap::new();
        for p in self.items.iter().filter_map(|i| i.processing.as_ref()) {
            if let Some(h) = p.assigned_class.hypothesis() {
                *tallies.entry(h.to_string()).or_default() += 1;
            }
        }
        let hyps: Vec<String> = self.scenario.hypothesis_ids().map(String::from).collect();
        for h in hyps {
            let tally = tallies.get(&h).copied().unwrap_or(0);
            if let Some(q) = maybe_raise_question(
                &self.scenario,
                &mut self.sources,
                &self.questions,
                &h,
                tally,
                self.tick,
            ) {
                self.emit(
                    SYSTEM,
                    "question",
                    json!({ "hypothesis": q.hypothesis, "unlocked_sources": q.unlocked_sources }),
                    EventOutcome::info(),
                );
                self.questions.push(q);
            }
        }
        self.metrics.mislabel_rate_final = self.mislabel_rate();
    }

    fn mislabel_rate(&self) -> f64 {
        let processed = self.items.iter().filter(|i| i.processing.is_some()).count();
        if processed == 0 {
            return 0.0;
        }
        let wrong = self.items.iter().filter(|i| i.is_mislabeled()).count();
        wrong as f64 / processed as f64
    }

    fn record_decision(&mut self) {
        let (chosen, _) = map_hypothesis(&self.belief);
        self.metrics.decided = true;
        self.metrics.ticks_to_decision = Some(self.tick);
        self.metrics.correct = Some(chosen == self.scenario.ground_truth);
        self.metrics.chosen = Some(chosen);
        self.stop = Some(super::StopReason::Decided);
    }

    /// Nothing is left to process and no discovered source can still yield
    /// items.
    fn exhausted(&self) -> bool {
        let unprocessed = self.items.iter().any(|i| i.processing.is_none());
        if unprocessed {
            return false;
        }
        !self.scenario.sources.iter().any(|s| {
            self.sources[&s.id].discovered
                && self.remaining(&s.id) > 0
                && self.grants.get(&s.id) != Some(&false)
        })
    }

    /// Advances one tick and returns the events it produced.
    pub fn step(&mut self) -> Result<Vec<SimEvent>, EngineError> {
        if self.stop.is_some() {
            return Err(EngineError::SessionFinished);
        }
        let start = self.log.len();
        let t = self.tick;
        self.emit(SYSTEM, "tick", json!({}), EventOutcome::info());

        let from = self.machine.current().to_string();
        let r = self.machine.tick();
        if r.changed {
            self.note_transition(&from, &r.new_state, json!("dwell"));
        }

        for idx in 0..self.actors.len() {
            let a = &self.actors[idx];
            let action = match &a.binding {
                ActorBinding::LiveHuman => match self.queued.take() {
                    Some(action) => action,
                    None => continue,
                },
                _ if a.next_ready > t => continue,
                ActorBinding::Agent(profile) => {
                    let perms = self.permissions(&a.id);
                    let view = self.view();
                    let profile = profile.clone();
                    let id = a.id.clone();
                    plan_agent_action(&id, &view, &profile, &perms, &mut self.rng)
                }
                ActorBinding::SimHuman(profile) => {
                    let perms = self.permissions(&a.id);
                    let view = self.view();
                    let profile = profile.clone();
                    let id = a.id.clone();
                    plan_sim_human_action(&id, &view, &profile, &perms, &mut self.rng)
                }
            };
            if action.kind == ActionKind::Idle {
                self.actors[idx].next_ready = t + 1;
                continue;
            }
            let executed = self.execute(idx, &action);
            let a = &mut self.actors[idx];
            a.next_ready = if executed { t + a.speed() } else { t + 1 };
        }

        let state = self.machine.current_state();
        let monitoring: Vec<String> = self
            .actors
            .iter()
            .filter(|a| {
                state
                    .allocations
                    .iter()
                    .any(|al| al.actor == a.id && al.work == Work::Indirect)
            })
            .map(|a| a.id.clone())
            .collect();
        for id in monitoring {
            if let Some(w) = self.metrics.workload.get_mut(&id) {
                w.indirect_ticks += 1;
            }
        }

        self.tick = t + 1;
        if decision_reached(&self.belief, self.scenario.generator.tau) {
            self.record_decision();
        } else if self.tick >= self.config.max_ticks {
            self.stop = Some(StopReason::MaxTicks);
        } else if self.exhausted() {
            self.stop = Some(StopReason::Exhausted);
        }
        if let Some(reason) = self.stop {
            self.metrics.correct.get_or_insert(false);
            let mut payload = json!({ "reason": reason });
            if let Some(chosen) = &self.metrics.chosen {
                payload["hypothesis"] = json!(chosen);
            }
            // belongs to the tick that just ran
            self.tick = t;
            self.emit(SYSTEM, "stop", payload, EventOutcome::info());
            self.tick = t + 1;
        }
        self.seq = 0;
        self.metrics.mislabel_rate_final = self.mislabel_rate();
        Ok(self.log[start..].to_vec())
    }

    /// Queues an action from the live human for the next step. Commands fire
    /// the pattern machine immediately.
    pub fn submit_human_action(&mut self, action: Action) -> Result<Ack, EngineError> {
        if !self.config.live_mode {
            return Err(EngineError::NotLiveMode);
        }
        let live = self.live_human().ok_or(EngineError::NoLiveHuman)?;
        if action.actor != live {
            return Err(EngineError::NotLiveHuman(action.actor));
        }
        if self.stop.is_some() {
            return Err(EngineError::SessionFinished);
        }
        self.schedule.push(ScheduledAction {
            tick: self.tick,
            action: action.clone(),
        });
        if let ActionKind::Command { .. } = action.kind {
            let idx = self
                .actors
                .iter()
                .position(|a| a.id == action.actor)
                .expect("live human is a session actor");
            let start = self.log.len();
            self.execute(idx, &action);
            return Ok(Ack {
                queued: false,
                events: self.log[start..].to_vec(),
            });
        }
        self.queued = Some(action);
        Ok(Ack {
            queued: true,
            events: Vec::new(),
        })
    }

    /// Steps until a stop condition. Batch sessions only.
    pub fn run_to_completion(&mut self) -> Outcome {
        while self.stop.is_none() {
            if self.tick >= self.config.max_ticks {
                self.stop = Some(StopReason::MaxTicks);
                self.metrics.correct.get_or_insert(false);
                break;
            }
            self.step().expect("session is running");
        }
        self.outcome()
    }

    pub fn outcome(&self) -> Outcome {
        let chosen = map_hypothesis(&self.belief).0;
        let decided = self.metrics.decided;
        Outcome {
            decided,
            correct: decided && chosen == self.scenario.ground_truth,
            chosen,
            metrics: self.metrics.clone(),
        }
    }
}
