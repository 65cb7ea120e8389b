#![allow(dead_code)]

use teamsim_core::agents::{Action, ActionKind};
use teamsim_core::engine::{default_bindings, ActorBinding, Session, SessionConfig};
use teamsim_core::pattern::{parse_pattern, presets, Pattern};
use teamsim_core::rng::Lcg;
use teamsim_core::world::{generate_scenario, Label, ScenarioConfig};

pub fn preset(name: &str) -> Pattern {
    parse_pattern(presets::pattern_source(name).unwrap()).unwrap()
}

pub fn batch(pattern: &str, seed: u64) -> Session {
    let p = preset(pattern);
    let s = generate_scenario(&ScenarioConfig::default(), seed).unwrap();
    let mut session = Session::new(s, p.clone(), &default_bindings(&p), SessionConfig::batch(seed)).unwrap();
    session.run_to_completion();
    session
}

pub fn live(pattern: &str, seed: u64) -> Session {
    let p = preset(pattern);
    let s = generate_scenario(&ScenarioConfig::default(), seed).unwrap();
    let mut b = default_bindings(&p);
    b.insert("h".into(), ActorBinding::LiveHuman);
    Session::new(s, p, &b, SessionConfig::live(seed).with_max_ticks(300)).unwrap()
}

/// Drives a live session with a scripted, partly nonsensical analyst: every
/// few ticks it tries some action, allowed or not.
pub fn scripted_live(pattern: &str, seed: u64) -> Session {
    let mut s = live(pattern, seed);
    let mut rng = Lcg::new(seed.wrapping_mul(7919));
    let commands = ["go_auto", "go_manual", "take_over", "bogus"];
    while !s.is_finished() {
        if rng.chance(0.4) {
            let snap = s.snapshot();
            let src = snap.sources[rng.index(snap.sources.len())].id.clone();
            let kind = match rng.index(7) {
                0 => ActionKind::Command { name: commands[rng.index(commands.len())].into() },
                1 => ActionKind::Collect { source: src },
                2 => match snap.unprocessed.first() {
                    Some(i) => ActionKind::Process { item: i.id.clone() },
                    None => ActionKind::Idle,
                },
                3 => ActionKind::Authorize { source: src, grant: rng.chance(0.7) },
                4 => match snap.items.first() {
                    Some(i) => ActionKind::Correct {
                        item: i.id.clone(),
                        class: Label::Noise,
                        reliability: None,
                    },
                    None => ActionKind::Idle,
                },
                5 => ActionKind::Guide { agent: "a".into(), source: src },
                _ => ActionKind::DirectSrcs { source: src },
            };
            s.submit_human_action(Action { actor: "h".into(), kind }).unwrap();
        }
        if !s.is_finished() {
            s.step().unwrap();
        }
    }
    s
}

pub const PRESETS: [&str; 6] = [
    "manual",
    "autonomous_strict",
    "supervisory",
    "highly_autonomous",
    "phased_autonomy",
    "collaborative",
];

/// Every session the audits look at.
pub fn corpus() -> Vec<Session> {
    let mut out = Vec::new();
    for p in PRESETS {
        for seed in 1..=10 {
            out.push(batch(p, seed));
        }
        if p != "autonomous_strict" {
            for seed in 1..=4 {
                out.push(scripted_live(p, seed));
            }
        }
    }
    out
}
