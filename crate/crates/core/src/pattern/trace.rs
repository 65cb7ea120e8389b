//! Bounded exploration of pattern-machine trajectories.

use super::{Pattern, PatternMachine, Trigger};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineEvent {
    Fire(Trigger),
    Tick,
}

/// Every trigger mentioned by the pattern, one trigger no transition matches,
/// and a tick.
pub fn alphabet(p: &Pattern) -> Vec<MachineEvent> {
    let mut triggers: Vec<Trigger> = p.transitions.iter().map(|t| t.trigger.clone()).collect();
    triggers.sort();
    triggers.dedup();
    let mut out: Vec<_> = triggers.into_iter().map(MachineEvent::Fire).collect();
    out.push(MachineEvent::Fire(Trigger::command("__unmatched__")));
    out.push(MachineEvent::Tick);
    out
}

/// Visits the state trajectory (initial state included) of every event
/// sequence of length `0..=max_len` over `alphabet`.
pub fn for_each_trajectory(
    start: &PatternMachine,
    alphabet: &[MachineEvent],
    max_len: usize,
    visit: &mut dyn FnMut(&[String]),
) {
    fn go(
        m: &PatternMachine,
        alphabet: &[MachineEvent],
        left: usize,
        traj: &mut Vec<String>,
        visit: &mut dyn FnMut(&[String]),
    ) {
        visit(traj);
        if left == 0 {
            return;
        }
        for ev in alphabet {
            let mut next = m.clone();
            let r = match ev {
                MachineEvent::Fire(t) => next.fire(t),
                MachineEvent::Tick => next.tick(),
            };
            traj.push(r.new_state);
            go(&next, alphabet, left - 1, traj, visit);
            traj.pop();
        }
    }
    let mut traj = vec![start.current().to_string()];
    go(start, alphabet, max_len, &mut traj, visit);
}

/// True when the trajectory moves between states `a` and `b` (either order)
/// without passing through a handover state in between.
pub fn unmediated_switch(p: &Pattern, traj: &[String], a: &str, b: &str) -> bool {
    let is_handover = |s: &str| p.state(s).is_some_and(|st| st.is_handover);
    let mut last_endpoint: Option<&str> = None;
    for s in traj {
        if s == a || s == b {
            if let Some(prev) = last_endpoint {
                if prev != s {
                    return true;
                }
            }
            last_endpoint = Some(s);
        } else if is_handover(s) {
            last_endpoint = None;
        }
    }
    false
}
