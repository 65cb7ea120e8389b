use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{
    validate_pattern, Intervention, LintConfig, Pattern, PatternError, PatternState, Trigger,
    TriggerKind, Work,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FireResult {
    pub changed: bool,
    pub new_state: String,
}

/// Executable form of a lint-clean [`Pattern`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternMachine {
    pattern: Pattern,
    current: String,
    ticks_in_state: u32,
}

/// Compiles under the default lint configuration.
pub fn compile(p: Pattern) -> Result<PatternMachine, PatternError> {
    compile_with(p, &LintConfig::default())
}

pub fn compile_with(p: Pattern, config: &LintConfig) -> Result<PatternMachine, PatternError> {
    let report = validate_pattern(&p, config);
    if report.has_errors() {
        return Err(PatternError::LintFailure(report));
    }
    // R4 is clean, or disabled by the caller; fall back to the first state.
    let current = p
        .initial()
        .or_else(|| p.states.first().map(|s| s.name.as_str()))
        .ok_or_else(|| PatternError::unknown("state", "<initial>"))?
        .to_string();
    Ok(PatternMachine {
        pattern: p,
        current,
        ticks_in_state: 0,
    })
}

impl PatternMachine {
    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn current(&self) -> &str {
        &self.current
    }

    pub fn ticks_in_state(&self) -> u32 {
        self.ticks_in_state
    }

    pub fn current_state(&self) -> &PatternState {
        self.pattern
            .state(&self.current)
            .expect("machine state is always declared")
    }

    fn enter(&mut self, target: String) -> FireResult {
        self.current = target;
        self.ticks_in_state = 0;
        FireResult {
            changed: true,
            new_state: self.current.clone(),
        }
    }

    fn unchanged(&self) -> FireResult {
        FireResult {
            changed: false,
            new_state: self.current.clone(),
        }
    }

    /// Takes the transition matching `(current, trigger)`, if any. Unmatched
    /// triggers are no-ops.
    pub fn fire(&mut self, trigger: &Trigger) -> FireResult {
        let target = self
            .pattern
            .transitions
            .iter()
            .find(|t| t.from == self.current && &t.trigger == trigger)
            .map(|t| t.to.clone());
        match target {
            Some(t) => self.enter(t),
            None => self.unchanged(),
        }
    }

    /// Advances the dwell counter and follows the dwell edge once it elapses.
    pub fn tick(&mut self) -> FireResult {
        self.ticks_in_state = self.ticks_in_state.saturating_add(1);
        match self.current_state().dwell.clone() {
            Some(d) if self.ticks_in_state >= d.ticks => self.enter(d.target),
            _ => self.unchanged(),
        }
    }

    pub fn permitted_work(&self, actor: &str, task: &str) -> Result<Option<Work>, PatternError> {
        if self.pattern.actor(actor).is_none() {
            return Err(PatternError::unknown("actor", actor));
        }
        if !self.pattern.has_task(task) {
            return Err(PatternError::unknown("task", task));
        }
        Ok(self.current_state().work_of(actor, task))
    }

    pub fn permitted_interventions(
        &self,
        actor: &str,
    ) -> Result<BTreeSet<Intervention>, PatternError> {
        if self.pattern.actor(actor).is_none() {
            return Err(PatternError::unknown("actor", actor));
        }
        Ok(self
            .current_state()
            .interventions
            .get(actor)
            .cloned()
            .unwrap_or_default())
    }

    /// Names of command triggers leaving the current state.
    pub fn available_commands(&self) -> Vec<String> {
        self.pattern
            .transitions
            .iter()
            .filter(|t| t.from == self.current && t.trigger.kind == TriggerKind::Command)
            .map(|t| t.trigger.name.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{parse_pattern, presets, Rule};

    fn machine(src: &str) -> PatternMachine {
        compile(parse_pattern(src).unwrap()).unwrap()
    }

    fn dwell_pattern(n: u32) -> String {
        format!(
            "pattern d {{ actors: human h; tasks: t;
               state a {{ allocate h -> t [direct]; dwell: {n} -> b; }}
               state b {{ allocate h -> t [direct]; }}
               initial a; }}"
        )
    }

    #[test]
    fn compile_positions_at_initial() {
        let m = machine(
            "pattern m { actors: human h; tasks: collect; state s { allocate h -> collect [direct]; } initial s; }",
        );
        assert_eq!(m.current(), "s");
        assert_eq!(m.ticks_in_state(), 0);
        assert_eq!(machine(presets::PHASED_AUTONOMY).current(), "manual");
    }

    #[test]
    fn compile_rejects_r1_mutant() {
        let src = presets::PHASED_AUTONOMY.replace(
            "initial manual;",
            "transition manual -> autonomous on command(\"jump\"); initial manual;",
        );
        match compile(parse_pattern(&src).unwrap()) {
            Err(PatternError::LintFailure(r)) => assert!(r.rules().contains(&Rule::R1)),
            other => panic!("expected lint failure, got {other:?}"),
        }
    }

    #[test]
    fn fire_follows_table() {
        let mut m = machine(presets::PHASED_AUTONOMY);
        let r = m.fire(&Trigger::command("nonexistent"));
        assert!(!r.changed);
        assert_eq!(r.new_state, "manual");
        // a request with a command's name does not match
        assert!(!m.fire(&Trigger::request("go_auto")).changed);
        let r = m.fire(&Trigger::command("go_auto"));
        assert!(r.changed);
        assert_eq!(r.new_state, "handover_to_auto");
        assert_eq!(m.ticks_in_state(), 0);
    }

    #[test]
    fn dwell_of_one_moves_on_first_tick() {
        let mut m = machine(&dwell_pattern(1));
        let r = m.tick();
        assert!(r.changed);
        assert_eq!(r.new_state, "b");
    }

    #[test]
    fn dwell_of_five_counts() {
        let mut m = machine(&dwell_pattern(5));
        for _ in 0..4 {
            assert!(!m.tick().changed);
        }
        assert_eq!(m.tick().new_state, "b");
        assert_eq!(m.ticks_in_state(), 0);
        for _ in 0..50 {
            assert!(!m.tick().changed);
        }
    }

    #[test]
    fn phased_handover_completes_after_dwell() {
        let mut m = machine(presets::PHASED_AUTONOMY);
        m.fire(&Trigger::command("go_auto"));
        let states: Vec<_> = (0..5).map(|_| m.tick().new_state).collect();
        assert_eq!(states[3], "handover_to_auto");
        assert_eq!(states[4], "autonomous");
    }

    #[test]
    fn permissions_in_phased_autonomy() {
        let mut m = machine(presets::PHASED_AUTONOMY);
        assert_eq!(m.permitted_work("a", "collect").unwrap(), None);
        assert_eq!(m.permitted_work("h", "collect").unwrap(), Some(Work::Direct));
        m.fire(&Trigger::command("go_auto"));
        for _ in 0..5 {
            m.tick();
        }
        assert_eq!(m.current(), "autonomous");
        assert_eq!(m.permitted_work("h", "collect").unwrap(), Some(Work::Indirect));
        assert_eq!(m.permitted_work("a", "collect").unwrap(), Some(Work::Direct));
        assert!(matches!(
            m.permitted_work("ghost", "collect"),
            Err(PatternError::UnknownReference { .. })
        ));
        assert!(matches!(
            m.permitted_work("h", "dance"),
            Err(PatternError::UnknownReference { .. })
        ));
    }

    #[test]
    fn intervention_sets() {
        use Intervention::*;
        let m = machine(presets::COLLABORATIVE);
        assert_eq!(
            m.permitted_interventions("h").unwrap(),
            BTreeSet::from([Correct, Guide, Authorize])
        );
        assert!(m.permitted_interventions("a").unwrap().is_empty());

        let m = machine(presets::AUTONOMOUS_STRICT);
        assert!(m.permitted_interventions("a").unwrap().is_empty());
        assert!(m.permitted_interventions("h").is_err());

        let m = machine(presets::HIGHLY_AUTONOMOUS);
        assert_eq!(m.current(), "autonomous");
        assert_eq!(m.permitted_interventions("h").unwrap(), BTreeSet::from([Authorize]));
    }

    #[test]
    fn available_commands_per_state() {
        let mut m = machine(presets::PHASED_AUTONOMY);
        assert_eq!(m.available_commands(), vec!["go_auto"]);
        m.fire(&Trigger::command("go_auto"));
        assert!(m.available_commands().is_empty());
    }
}
