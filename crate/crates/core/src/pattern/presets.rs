//! Shipped team design patterns. Tasks follow the intelligence cycle:
//! `direct_srcs` (choose sources), `collect`, `process`.

pub const MANUAL: &str = r#"// The analyst performs the whole cycle alone.
pattern manual {
    actors: human h;
    tasks: direct_srcs, collect, process;
    state manual {
        allocate h -> direct_srcs [direct];
        allocate h -> collect [direct];
        allocate h -> process [direct];
        interventions h: authorize;
    }
    initial manual;
}
"#;

pub const AUTONOMOUS_STRICT: &str = r#"// Agents collect and process without any human in the team.
pattern autonomous_strict {
    actors: agent a;
    tasks: direct_srcs, collect, process;
    state autonomous {
        allocate a -> direct_srcs [direct];
        allocate a -> collect [direct];
        allocate a -> process [direct];
    }
    initial autonomous;
}
"#;

pub const SUPERVISORY: &str = r#"// The agent works; the human monitors and holds source authorization.
pattern supervisory {
    actors: human h, agent a;
    tasks: direct_srcs, collect, process;
    state supervised {
        allocate a -> direct_srcs [direct];
        allocate a -> collect [direct];
        allocate a -> process [direct];
        allocate h -> direct_srcs [indirect];
        allocate h -> collect [indirect];
        allocate h -> process [indirect];
        interventions h: authorize;
    }
    initial supervised;
}
"#;

pub const HIGHLY_AUTONOMOUS: &str = r#"// Agent-led, with residual human monitoring and a handover back to manual.
pattern highly_autonomous {
    actors: human h, agent a;
    tasks: direct_srcs, collect, process;
    state autonomous {
        allocate a -> direct_srcs [direct];
        allocate a -> collect [direct];
        allocate a -> process [direct];
        allocate h -> direct_srcs [indirect];
        allocate h -> collect [indirect];
        allocate h -> process [indirect];
        interventions h: authorize;
    }
    state handover_to_manual handover {
        allocate a -> direct_srcs [direct];
        allocate a -> collect [direct];
        allocate a -> process [direct];
        allocate h -> direct_srcs [indirect];
        allocate h -> collect [indirect];
        allocate h -> process [indirect];
        interventions h: authorize;
        dwell: 5 -> manual;
    }
    state manual {
        allocate h -> direct_srcs [direct];
        allocate h -> collect [direct];
        allocate h -> process [direct];
        interventions h: authorize;
    }
    transition autonomous -> handover_to_manual on command("take_over");
    initial autonomous;
}
"#;

pub const PHASED_AUTONOMY: &str = r#"// Manual and autonomous phases, always separated by a handover.
pattern phased_autonomy {
    actors: human h, agent a;
    tasks: direct_srcs, collect, process;
    state manual {
        allocate h -> direct_srcs [direct];
        allocate h -> collect [direct];
        allocate h -> process [direct];
        interventions h: authorize;
    }
    state handover_to_auto handover {
        allocate h -> direct_srcs [direct];
        allocate h -> collect [direct];
        allocate h -> process [direct];
        allocate a -> direct_srcs [indirect];
        allocate a -> collect [indirect];
        allocate a -> process [indirect];
        interventions h: authorize;
        dwell: 5 -> autonomous;
    }
    state autonomous {
        allocate a -> direct_srcs [direct];
        allocate a -> collect [direct];
        allocate a -> process [direct];
        allocate h -> direct_srcs [indirect];
        allocate h -> collect [indirect];
        allocate h -> process [indirect];
        interventions h: authorize;
    }
    state handover_to_manual handover {
        allocate a -> direct_srcs [direct];
        allocate a -> collect [direct];
        allocate a -> process [direct];
        allocate h -> direct_srcs [indirect];
        allocate h -> collect [indirect];
        allocate h -> process [indirect];
        interventions h: authorize;
        dwell: 5 -> manual;
    }
    transition manual -> handover_to_auto on command("go_auto");
    transition autonomous -> handover_to_manual on command("go_manual");
    initial manual;
}
"#;

pub const COLLABORATIVE: &str = r#"// Human directs and shares processing; the agent collects and processes.
pattern collaborative {
    actors: human h, agent a;
    tasks: direct_srcs, collect, process;
    state collaborative {
        allocate h -> direct_srcs [direct];
        allocate a -> collect [direct];
        allocate h -> process [direct];
        allocate a -> process [direct];
        interventions h: correct, guide, authorize;
    }
    initial collaborative;
}
"#;

/// `(name, source)` for every shipped pattern.
pub const PATTERNS: [(&str, &str); 6] = [
    ("manual", MANUAL),
    ("autonomous_strict", AUTONOMOUS_STRICT),
    ("supervisory", SUPERVISORY),
    ("highly_autonomous", HIGHLY_AUTONOMOUS),
    ("phased_autonomy", PHASED_AUTONOMY),
    ("collaborative", COLLABORATIVE),
];

pub fn pattern_source(name: &str) -> Option<&'static str> {
    let name = name.strip_suffix(".tdp").unwrap_or(name);
    PATTERNS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::parse_pattern;

    #[test]
    fn names_match_declarations() {
        for (name, src) in PATTERNS {
            assert_eq!(parse_pattern(src).unwrap().name, name);
        }
    }

    #[test]
    fn phased_autonomy_shape() {
        let p = parse_pattern(PHASED_AUTONOMY).unwrap();
        let names: Vec<_> = p.states.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(
            names,
            ["manual", "handover_to_auto", "autonomous", "handover_to_manual"]
        );
        let handovers: Vec<_> = p.states.iter().filter(|s| s.is_handover).map(|s| s.name.as_str()).collect();
        assert_eq!(handovers, ["handover_to_auto", "handover_to_manual"]);
    }

    #[test]
    fn lookup_accepts_file_suffix() {
        assert_eq!(pattern_source("phased_autonomy.tdp"), Some(PHASED_AUTONOMY));
        assert_eq!(pattern_source("nope"), None);
    }
}
