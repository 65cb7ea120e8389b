use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::lexer::{tokenize, Tok, Token};
use super::{
    ActorClass, ActorDecl, Allocation, Dwell, Intervention, Pattern, PatternError, PatternState,
    Span, Transition, Trigger, TriggerKind, Work,
};

/// Parses pattern DSL source into a [`Pattern`] whose references are all
/// resolved. Declarations may appear in any order.
pub fn parse_pattern(src: &str) -> Result<Pattern, PatternError> {
    let tokens = tokenize(src)?;
    let raw = Parser { tokens, pos: 0 }.pattern()?;
    resolve(raw)
}

struct RawState {
    name: String,
    is_handover: bool,
    span: Span,
    allocations: Vec<(Allocation, Span)>,
    interventions: Vec<(String, BTreeSet<Intervention>)>,
    dwells: Vec<Dwell>,
}

struct RawPattern {
    name: String,
    span: Span,
    actors: Vec<ActorDecl>,
    tasks: Vec<String>,
    states: Vec<RawState>,
    transitions: Vec<Transition>,
    initials: Vec<String>,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, tok: &Token, expected: &str) -> PatternError {
        PatternError::Syntax {
            line: tok.span.line,
            col: tok.span.col,
            message: format!("expected {expected}, found {}", tok.tok.describe()),
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), PatternError> {
        let t = self.next();
        if t.tok == Tok::Punct(c) {
            Ok(())
        } else {
            Err(self.error_at(&t, &format!("`{c}`")))
        }
    }

    fn expect_arrow(&mut self) -> Result<(), PatternError> {
        let t = self.next();
        if t.tok == Tok::Arrow {
            Ok(())
        } else {
            Err(self.error_at(&t, "`->`"))
        }
    }

    fn ident(&mut self) -> Result<(String, Span), PatternError> {
        let t = self.next();
        match t.tok {
            Tok::Ident(s) => Ok((s, t.span)),
            _ => Err(self.error_at(&t, "identifier")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Span, PatternError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) if s == kw => Ok(t.span),
            _ => Err(self.error_at(&t, &format!("`{kw}`"))),
        }
    }

    fn peek_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    /// `IDENT ("," IDENT)*`
    fn ident_list(&mut self) -> Result<Vec<(String, Span)>, PatternError> {
        let mut out = vec![self.ident()?];
        while self.peek_punct(',') {
            self.next();
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn pattern(mut self) -> Result<RawPattern, PatternError> {
        let span = self.keyword("pattern")?;
        let (name, _) = self.ident()?;
        self.expect_punct('{')?;
        let mut raw = RawPattern {
            name,
            span,
            actors: Vec::new(),
            tasks: Vec::new(),
            states: Vec::new(),
            transitions: Vec::new(),
            initials: Vec::new(),
        };
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Punct('}') => {
                    self.next();
                    break;
                }
                Tok::Ident(kw) => match kw.as_str() {
                    "actors" => self.actors(&mut raw.actors)?,
                    "tasks" => {
                        self.next();
                        self.expect_punct(':')?;
                        raw.tasks
                            .extend(self.ident_list()?.into_iter().map(|(s, _)| s));
                        self.expect_punct(';')?;
                    }
                    "state" => raw.states.push(self.state()?),
                    "transition" => raw.transitions.push(self.transition()?),
                    "initial" => {
                        self.next();
                        raw.initials.push(self.ident()?.0);
                        self.expect_punct(';')?;
                    }
                    _ => {
                        return Err(self.error_at(
                            &t,
                            "`actors`, `tasks`, `state`, `transition`, `initial` or `}`",
                        ))
                    }
                },
                _ => return Err(self.error_at(&t, "declaration or `}`")),
            }
        }
        let t = self.next();
        if t.tok != Tok::Eof {
            return Err(self.error_at(&t, "end of input"));
        }
        Ok(raw)
    }

    fn actors(&mut self, out: &mut Vec<ActorDecl>) -> Result<(), PatternError> {
        self.next();
        self.expect_punct(':')?;
        loop {
            let t = self.next();
            let class = match &t.tok {
                Tok::Ident(s) if s == "human" => ActorClass::Human,
                Tok::Ident(s) if s == "agent" => ActorClass::Agent,
                _ => return Err(self.error_at(&t, "`human` or `agent`")),
            };
            let (id, _) = self.ident()?;
            out.push(ActorDecl { id, class });
            if self.peek_punct(',') {
                self.next();
            } else {
                break;
            }
        }
        self.expect_punct(';')
    }

    fn state(&mut self) -> Result<RawState, PatternError> {
        let span = self.keyword("state")?;
        let (name, _) = self.ident()?;
        let is_handover = if self.peek_keyword("handover") {
            self.next();
            true
        } else {
            false
        };
        self.expect_punct('{')?;
        let mut st = RawState {
            name,
            is_handover,
            span,
            allocations: Vec::new(),
            interventions: Vec::new(),
            dwells: Vec::new(),
        };
        loop {
            let t = self.next();
            match &t.tok {
                Tok::Punct('}') => break,
                Tok::Ident(kw) if kw == "allocate" => {
                    let (actor, _) = self.ident()?;
                    self.expect_arrow()?;
                    let (task, _) = self.ident()?;
                    self.expect_punct('[')?;
                    let w = self.next();
                    let work = match &w.tok {
                        Tok::Ident(s) if s == "direct" => Work::Direct,
                        Tok::Ident(s) if s == "indirect" => Work::Indirect,
                        _ => return Err(self.error_at(&w, "`direct` or `indirect`")),
                    };
                    self.expect_punct(']')?;
                    self.expect_punct(';')?;
                    st.allocations
                        .push((Allocation { actor, task, work }, t.span));
                }
                Tok::Ident(kw) if kw == "interventions" => {
                    let (actor, _) = self.ident()?;
                    self.expect_punct(':')?;
                    let mut set = BTreeSet::new();
                    for (name, span) in self.ident_list()? {
                        let iv = Intervention::from_name(&name).ok_or(PatternError::Syntax {
                            line: span.line,
                            col: span.col,
                            message: format!(
                                "unknown intervention `{name}` (expected correct, guide or authorize)"
                            ),
                        })?;
                        set.insert(iv);
                    }
                    self.expect_punct(';')?;
                    st.interventions.push((actor, set));
                }
                Tok::Ident(kw) if kw == "dwell" => {
                    self.expect_punct(':')?;
                    let n = self.next();
                    let ticks = match n.tok {
                        Tok::Int(v) if v >= 1 && v <= u32::MAX as u64 => v as u32,
                        _ => return Err(self.error_at(&n, "positive integer")),
                    };
                    self.expect_arrow()?;
                    let (target, _) = self.ident()?;
                    self.expect_punct(';')?;
                    st.dwells.push(Dwell { ticks, target });
                }
                _ => return Err(self.error_at(&t, "`allocate`, `interventions`, `dwell:` or `}`")),
            }
        }
        Ok(st)
    }

    fn transition(&mut self) -> Result<Transition, PatternError> {
        let span = self.keyword("transition")?;
        let (from, _) = self.ident()?;
        self.expect_arrow()?;
        let (to, _) = self.ident()?;
        self.keyword("on")?;
        let t = self.next();
        let kind = match &t.tok {
            Tok::Ident(s) if s == "command" => TriggerKind::Command,
            Tok::Ident(s) if s == "request" => TriggerKind::Request,
            _ => return Err(self.error_at(&t, "`command` or `request`")),
        };
        self.expect_punct('(')?;
        let s = self.next();
        let name = match s.tok {
            Tok::Str(v) => v,
            _ => return Err(self.error_at(&s, "string")),
        };
        self.expect_punct(')')?;
        self.expect_punct(';')?;
        Ok(Transition {
            from,
            to,
            trigger: Trigger { kind, name },
            span,
        })
    }
}

fn resolve(raw: RawPattern) -> Result<Pattern, PatternError> {
    if raw.actors.is_empty() {
        return Err(PatternError::Syntax {
            line: raw.span.line,
            col: raw.span.col,
            message: format!("pattern `{}` declares no actors", raw.name),
        });
    }
    let mut seen = HashSet::new();
    for a in &raw.actors {
        if !seen.insert(a.id.as_str()) {
            return Err(PatternError::duplicate("actor", &a.id));
        }
    }
    let mut seen = HashSet::new();
    for t in &raw.tasks {
        if !seen.insert(t.as_str()) {
            return Err(PatternError::duplicate("task", t));
        }
    }
    let mut state_names = HashSet::new();
    for s in &raw.states {
        if !state_names.insert(s.name.as_str()) {
            return Err(PatternError::duplicate("state", &s.name));
        }
    }
    let actor_class = |id: &str| raw.actors.iter().find(|a| a.id == id).map(|a| a.class);
    let has_task = |t: &str| raw.tasks.iter().any(|x| x == t);
    let has_state = |s: &str| state_names.contains(s);

    let mut states = Vec::with_capacity(raw.states.len());
    for s in &raw.states {
        let mut pairs = HashSet::new();
        let mut allocations = Vec::new();
        for (alloc, _) in &s.allocations {
            if actor_class(&alloc.actor).is_none() {
                return Err(PatternError::unknown("actor", &alloc.actor));
            }
            if !has_task(&alloc.task) {
                return Err(PatternError::unknown("task", &alloc.task));
            }
            if !pairs.insert((alloc.actor.as_str(), alloc.task.as_str())) {
                return Err(PatternError::duplicate(
                    "allocation",
                    &format!("{} -> {} in state {}", alloc.actor, alloc.task, s.name),
                ));
            }
            allocations.push(alloc.clone());
        }
        let mut interventions = BTreeMap::new();
        for (actor, set) in &s.interventions {
            if actor_class(actor) != Some(ActorClass::Human) {
                return Err(PatternError::unknown("human", actor));
            }
            if interventions.insert(actor.clone(), set.clone()).is_some() {
                return Err(PatternError::duplicate(
                    "interventions",
                    &format!("{actor} in state {}", s.name),
                ));
            }
        }
        if s.dwells.len() > 1 {
            return Err(PatternError::duplicate("dwell", &s.name));
        }
        let dwell = s.dwells.first().cloned();
        if let Some(d) = &dwell {
            if !has_state(&d.target) {
                return Err(PatternError::unknown("state", &d.target));
            }
        }
        states.push(PatternState {
            name: s.name.clone(),
            is_handover: s.is_handover,
            allocations,
            interventions,
            dwell,
            span: s.span,
        });
    }

    let mut triggers = HashSet::new();
    for t in &raw.transitions {
        for endpoint in [&t.from, &t.to] {
            if !has_state(endpoint) {
                return Err(PatternError::unknown("state", endpoint));
            }
        }
        if !triggers.insert((t.from.as_str(), t.trigger.kind, t.trigger.name.as_str())) {
            return Err(PatternError::DuplicateTrigger {
                state: t.from.clone(),
                trigger: t.trigger.to_string(),
            });
        }
    }
    for init in &raw.initials {
        if !has_state(init) {
            return Err(PatternError::unknown("state", init));
        }
    }

    Ok(Pattern {
        name: raw.name,
        actors: raw.actors,
        tasks: raw.tasks,
        states,
        transitions: raw.transitions,
        initial_decls: raw.initials,
    })
}
