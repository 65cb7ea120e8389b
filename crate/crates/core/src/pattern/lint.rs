use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ActorClass, Pattern, PatternState, Span, Work};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    /// Transfers of direct work pass through a handover state.
    R1,
    /// Some human monitors when agents hold all direct work.
    R2,
    /// Every state is reachable from the initial state.
    R3,
    /// Exactly one initial declaration.
    R4,
    /// Every task has a direct performer outside handovers.
    R5,
}

impl Rule {
    pub const ALL: [Rule; 5] = [Rule::R1, Rule::R2, Rule::R3, Rule::R4, Rule::R5];

    pub fn default_severity(self) -> Severity {
        match self {
            Rule::R1 | Rule::R3 | Rule::R4 => Severity::Error,
            Rule::R2 | Rule::R5 => Severity::Warning,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

/// Per-rule severity overrides. A rule mapped to `None` is disabled.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintConfig {
    pub overrides: BTreeMap<Rule, Option<Severity>>,
}

impl LintConfig {
    /// Every enabled rule reports at error severity.
    pub fn strict() -> Self {
        Self {
            overrides: Rule::ALL
                .into_iter()
                .map(|r| (r, Some(Severity::Error)))
                .collect(),
        }
    }

    pub fn severity(&self, rule: Rule) -> Option<Severity> {
        match self.overrides.get(&rule) {
            Some(o) => *o,
            None => Some(rule.default_severity()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Location {
    Pattern,
    State {
        state: String,
        span: Span,
    },
    Transition {
        from: String,
        to: String,
        /// The trigger text, or `dwell` for a dwell edge.
        trigger: String,
        span: Span,
    },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Pattern => write!(f, "pattern"),
            Location::State { state, span } => write!(f, "{span}: state `{state}`"),
            Location::Transition {
                from,
                to,
                trigger,
                span,
            } => write!(f, "{span}: transition `{from}` -> `{to}` on {trigger}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub rule: Rule,
    pub severity: Severity,
    pub location: Location,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LintReport {
    pub findings: Vec<Finding>,
}

impl LintReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn rules(&self) -> BTreeSet<Rule> {
        self.findings.iter().map(|f| f.rule).collect()
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}[{}] {}: {}", self.rule, self.location, self.message)
    }
}

impl fmt::Display for LintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for finding in &self.findings {
            writeln!(f, "{finding}")?;
        }
        Ok(())
    }
}

struct Edge<'a> {
    from: &'a PatternState,
    to: &'a PatternState,
    location: Location,
}

fn edges(p: &Pattern) -> Vec<Edge<'_>> {
    let mut out = Vec::new();
    for t in &p.transitions {
        if let (Some(from), Some(to)) = (p.state(&t.from), p.state(&t.to)) {
            out.push(Edge {
                from,
                to,
                location: Location::Transition {
                    from: t.from.clone(),
                    to: t.to.clone(),
                    trigger: t.trigger.to_string(),
                    span: t.span,
                },
            });
        }
    }
    for s in &p.states {
        if let Some(to) = s.dwell.as_ref().and_then(|d| p.state(&d.target)) {
            out.push(Edge {
                from: s,
                to,
                location: Location::Transition {
                    from: s.name.clone(),
                    to: to.name.clone(),
                    trigger: "dwell".into(),
                    span: s.span,
                },
            });
        }
    }
    out
}

fn state_loc(s: &PatternState) -> Location {
    Location::State {
        state: s.name.clone(),
        span: s.span,
    }
}

/// Applies rules R1-R5. Findings are data: this never fails.
pub fn validate_pattern(p: &Pattern, config: &LintConfig) -> LintReport {
    let mut raw: Vec<(Rule, Location, String)> = Vec::new();

    // R1: a task whose direct performers change wholesale must pass through a
    // handover state.
    for e in edges(p) {
        if e.from.is_handover || e.to.is_handover {
            continue;
        }
        for task in &p.tasks {
            let before = e.from.direct_performers(task);
            let after = e.to.direct_performers(task);
            if !before.is_empty() && !after.is_empty() && before.is_disjoint(&after) {
                raw.push((
                    Rule::R1,
                    e.location.clone(),
                    format!(
                        "direct work on `{task}` moves from {before:?} to {after:?} without a handover state"
                    ),
                ));
            }
        }
    }

    // R2
    if p.humans().next().is_some() {
        for s in &p.states {
            let direct: Vec<_> = s
                .allocations
                .iter()
                .filter(|a| a.work == Work::Direct)
                .collect();
            let agents_only = !direct.is_empty()
                && direct
                    .iter()
                    .all(|a| p.actor(&a.actor).map(|d| d.class) == Some(ActorClass::Agent));
            let monitored = s.allocations.iter().any(|a| {
                a.work == Work::Indirect
                    && p.actor(&a.actor).map(|d| d.class) == Some(ActorClass::Human)
            });
            if agents_only && !monitored {
                raw.push((
                    Rule::R2,
                    state_loc(s),
                    "agents hold all direct work but no human monitors (indirect allocation)"
                        .into(),
                ));
            }
        }
    }

    // R3
    for t in &p.transitions {
        for endpoint in [&t.from, &t.to] {
            if p.state(endpoint).is_none() {
                raw.push((
                    Rule::R3,
                    Location::Transition {
                        from: t.from.clone(),
                        to: t.to.clone(),
                        trigger: t.trigger.to_string(),
                        span: t.span,
                    },
                    format!("endpoint `{endpoint}` is not a declared state"),
                ));
            }
        }
    }
    if let Some(init) = p.initial().filter(|i| p.state(i).is_some()) {
        let mut seen = BTreeSet::from([init]);
        let mut queue = VecDeque::from([init]);
        while let Some(s) = queue.pop_front() {
            for next in p.successors(s) {
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        for s in &p.states {
            if !seen.contains(s.name.as_str()) {
                raw.push((
                    Rule::R3,
                    state_loc(s),
                    format!("state is unreachable from initial state `{init}`"),
                ));
            }
        }
    }

    // R4
    if p.initial_decls.len() != 1 {
        raw.push((
            Rule::R4,
            Location::Pattern,
            format!(
                "expected exactly one initial declaration, found {}",
                p.initial_decls.len()
            ),
        ));
    }

    // R5
    for s in p.states.iter().filter(|s| !s.is_handover) {
        for task in &p.tasks {
            if s.direct_performers(task).is_empty() {
                raw.push((
                    Rule::R5,
                    state_loc(s),
                    format!("task `{task}` has no direct performer"),
                ));
            }
        }
    }

    let findings = raw
        .into_iter()
        .filter_map(|(rule, location, message)| {
            config.severity(rule).map(|severity| Finding {
                rule,
                severity,
                location,
                message,
            })
        })
        .collect();
    LintReport { findings }
}
