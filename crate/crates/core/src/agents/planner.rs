use super::{
    relabel, Action, ActionKind, AgentProfile, Permissions, SensitivePolicy, SimHumanProfile,
    View, tasks,
};
use crate::pattern::Intervention;
use crate::rng::Lcg;
use crate::world::Sensitivity;

/// Effective sensitive-source policy: whenever some human in the current
/// pattern state can authorize, every actor asks instead of helping itself.
fn effective_policy(profile: SensitivePolicy, view: &View) -> SensitivePolicy {
    if view.authority_available {
        SensitivePolicy::Skip
    } else {
        profile
    }
}

/// Where an actor with `guided` and `policy` would collect next.
fn collect_target(view: &View, guided: Option<&str>, policy: SensitivePolicy) -> Option<String> {
    if view.is_collectable(guided, policy) {
        return guided.map(String::from);
    }
    if view.is_collectable(view.focus.as_deref(), policy) {
        return view.focus.clone();
    }
    view.collectable(policy).next().map(|s| s.id.clone())
}

/// A sensitive source worth asking about: discovered, not exhausted, no
/// decision on it yet and no request outstanding.
fn authorization_candidate(view: &View) -> Option<String> {
    view.sources
        .iter()
        .find(|s| {
            s.sensitivity == Sensitivity::Sensitive
                && s.discovered
                && s.remaining > 0
                && s.grant.is_none()
                && !s.pending
        })
        .map(|s| s.id.clone())
}

/// The direct-work chain shared by agents and the simulated human: process,
/// then (re)direct, then collect, then ask for authorization.
fn direct_work(
    view: &View,
    perms: &Permissions,
    guided: Option<&str>,
    policy: SensitivePolicy,
    choose_focus: &mut dyn FnMut(&[&str]) -> String,
) -> Option<ActionKind> {
    if perms.direct_on(tasks::PROCESS) {
        if let Some(item) = view.unprocessed.first() {
            return Some(ActionKind::Process { item: item.clone() });
        }
    }
    if perms.direct_on(tasks::DIRECT_SRCS) && !view.is_collectable(view.focus.as_deref(), policy) {
        let options: Vec<&str> = view.collectable(policy).map(|s| s.id.as_str()).collect();
        if !options.is_empty() {
            return Some(ActionKind::DirectSrcs {
                source: choose_focus(&options),
            });
        }
    }
    if perms.direct_on(tasks::COLLECT) {
        if let Some(source) = collect_target(view, guided, policy) {
            return Some(ActionKind::Collect { source });
        }
        if policy == SensitivePolicy::Skip {
            if let Some(source) = authorization_candidate(view) {
                return Some(ActionKind::RequestAuthorization { source });
            }
        }
    }
    None
}

/// Agent policy: process the oldest unprocessed item; else direct attention
/// to the first accessible source; else collect (guidance first); else ask for
/// authorization when only sensitive sources remain; else idle.
pub fn plan_agent_action(
    actor: &str,
    view: &View,
    profile: &AgentProfile,
    perms: &Permissions,
    _rng: &mut Lcg,
) -> Action {
    let policy = effective_policy(profile.sensitive_policy, view);
    let guided = view
        .agents
        .iter()
        .find(|a| a.id == actor)
        .and_then(|a| a.state.guided.as_deref());
    let kind = direct_work(view, perms, guided, policy, &mut |opts| opts[0].to_string())
        .unwrap_or(ActionKind::Idle);
    Action {
        actor: actor.into(),
        kind,
    }
}

fn richest<'a>(view: &View, options: &[&'a str]) -> &'a str {
    options
        .iter()
        .copied()
        .reduce(|best, id| {
            let rate = |x: &str| view.source(x).map_or(0.0, |s| s.signal_rate);
            if rate(id) > rate(best) {
                id
            } else {
                best
            }
        })
        .expect("options are nonempty")
}

fn skilled_pick(view: &View, options: &[&str], skill: f64, rng: &mut Lcg) -> String {
    if rng.chance(skill) {
        richest(view, options).to_string()
    } else {
        options[rng.index(options.len())].to_string()
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Simulated analyst, in priority order: grant a pending authorization;
/// correct a spotted agent mislabel while reviewing processing; do direct
/// work; steer an agent off a weak source; idle.
pub fn plan_sim_human_action(
    actor: &str,
    view: &View,
    profile: &SimHumanProfile,
    perms: &Permissions,
    rng: &mut Lcg,
) -> Action {
    let act = |kind| Action {
        actor: actor.into(),
        kind,
    };

    if perms.may(Intervention::Authorize) {
        if let Some(s) = view.sources.iter().find(|s| s.pending) {
            return act(ActionKind::Authorize {
                source: s.id.clone(),
                grant: true,
            });
        }
    }

    if perms.may(Intervention::Correct) && perms.holds(tasks::PROCESS) {
        for item in view.review.iter().filter(|i| i.is_mislabeled()) {
            if rng.chance(profile.detection_prob) {
                let class = relabel(
                    &item.true_class,
                    &view.labels,
                    profile.classification_accuracy,
                    rng,
                );
                let reliability = (item.true_reliability
                    + rng.uniform_range(-profile.reliability_noise, profile.reliability_noise))
                .clamp(0.0, 1.0);
                return act(ActionKind::Correct {
                    item: item.id.clone(),
                    class,
                    reliability: Some(reliability),
                });
            }
        }
    }

    let skill = profile.guidance_skill;
    if let Some(kind) = direct_work(view, perms, None, SensitivePolicy::Skip, &mut |opts| {
        skilled_pick(view, opts, skill, rng)
    }) {
        return act(kind);
    }

    if perms.may(Intervention::Guide) {
        let options: Vec<&str> = view
            .collectable(SensitivePolicy::Skip)
            .map(|s| s.id.as_str())
            .collect();
        if !options.is_empty() {
            let mid = median(
                options
                    .iter()
                    .filter_map(|id| view.source(id))
                    .map(|s| s.signal_rate)
                    .collect(),
            );
            for agent in &view.agents {
                let Some(current) = agent.state.last_source.as_deref() else {
                    continue;
                };
                let Some(src) = view.source(current) else {
                    continue;
                };
                if agent.state.guided.is_some() || !src.collectable(SensitivePolicy::Skip) {
                    continue;
                }
                if src.signal_rate < mid && rng.chance(skill) {
                    let target = skilled_pick(view, &options, skill, rng);
                    if target != current {
                        return act(ActionKind::Guide {
                            agent: agent.id.clone(),
                            source: target,
                        });
                    }
                }
            }
        }
    }

    act(ActionKind::Idle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{AgentState, ReviewItem, SourceView, TeammateView};
    use crate::world::Label;

    fn src(id: &str, sensitivity: Sensitivity, remaining: u32, rate: f64) -> SourceView {
        SourceView {
            id: id.into(),
            sensitivity,
            discovered: true,
            remaining,
            grant: None,
            pending: false,
            signal_rate: rate,
        }
    }

    fn view(sources: Vec<SourceView>) -> View {
        View {
            sources,
            unprocessed: vec![],
            review: vec![],
            labels: ["h1", "h2", "noise"].into_iter().map(Label::from).collect(),
            focus: None,
            authority_available: false,
            agents: vec![TeammateView {
                id: "a".into(),
                state: AgentState::default(),
            }],
        }
    }

    fn perms(direct: &[&str], ivs: &[Intervention]) -> Permissions {
        Permissions {
            direct: direct.iter().map(|s| s.to_string()).collect(),
            indirect: Default::default(),
            interventions: ivs.iter().copied().collect(),
        }
    }

    const ALL: [&str; 3] = [tasks::DIRECT_SRCS, tasks::COLLECT, tasks::PROCESS];

    fn agent(v: &View, p: &Permissions, profile: &AgentProfile) -> ActionKind {
        plan_agent_action("a", v, profile, p, &mut Lcg::new(0)).kind
    }

    #[test]
    fn agent_processes_oldest_first() {
        let mut v = view(vec![src("s1", Sensitivity::Open, 3, 0.5)]);
        v.unprocessed = vec!["s1-1".into(), "s1-2".into()];
        assert_eq!(
            agent(&v, &perms(&ALL, &[]), &AgentProfile::default()),
            ActionKind::Process { item: "s1-1".into() }
        );
    }

    #[test]
    fn agent_collects_from_open_source() {
        let mut v = view(vec![src("s1", Sensitivity::Open, 3, 0.5)]);
        v.focus = Some("s1".into());
        assert_eq!(
            agent(&v, &perms(&ALL, &[]), &AgentProfile::default()),
            ActionKind::Collect { source: "s1".into() }
        );
        // without a focus, directing comes first
        v.focus = None;
        assert_eq!(
            agent(&v, &perms(&ALL, &[]), &AgentProfile::default()),
            ActionKind::DirectSrcs { source: "s1".into() }
        );
    }

    #[test]
    fn agent_idles_when_nothing_left() {
        let v = view(vec![src("s1", Sensitivity::Open, 0, 0.5)]);
        assert_eq!(agent(&v, &perms(&ALL, &[]), &AgentProfile::default()), ActionKind::Idle);
    }

    #[test]
    fn guidance_overrides_focus() {
        let mut v = view(vec![
            src("s1", Sensitivity::Open, 3, 0.5),
            src("s2", Sensitivity::Open, 3, 0.5),
        ]);
        v.focus = Some("s1".into());
        v.agents[0].state.guided = Some("s2".into());
        assert_eq!(
            agent(&v, &perms(&ALL, &[]), &AgentProfile::default()),
            ActionKind::Collect { source: "s2".into() }
        );
        // exhausted guidance is skipped
        v.sources[1].remaining = 0;
        assert_eq!(
            agent(&v, &perms(&ALL, &[]), &AgentProfile::default()),
            ActionKind::Collect { source: "s1".into() }
        );
    }

    #[test]
    fn sensitive_policy() {
        let v = view(vec![src("s9", Sensitivity::Sensitive, 3, 0.9)]);
        let p = perms(&[tasks::COLLECT], &[]);
        assert_eq!(
            agent(&v, &p, &AgentProfile::default()),
            ActionKind::Collect { source: "s9".into() }
        );
        let skip = AgentProfile {
            sensitive_policy: SensitivePolicy::Skip,
            ..Default::default()
        };
        assert_eq!(
            agent(&v, &p, &skip),
            ActionKind::RequestAuthorization { source: "s9".into() }
        );
        // an available authority turns access into asking
        let mut v2 = v.clone();
        v2.authority_available = true;
        assert_eq!(
            agent(&v2, &p, &AgentProfile::default()),
            ActionKind::RequestAuthorization { source: "s9".into() }
        );
        // pending or denied: nothing more to ask
        v2.sources[0].pending = true;
        assert_eq!(agent(&v2, &p, &AgentProfile::default()), ActionKind::Idle);
        v2.sources[0].pending = false;
        v2.sources[0].grant = Some(false);
        assert_eq!(agent(&v2, &p, &AgentProfile::default()), ActionKind::Idle);
        v2.sources[0].grant = Some(true);
        assert_eq!(
            agent(&v2, &p, &AgentProfile::default()),
            ActionKind::Collect { source: "s9".into() }
        );
    }

    fn human(v: &View, p: &Permissions, profile: &SimHumanProfile, seed: u64) -> ActionKind {
        plan_sim_human_action("h", v, profile, p, &mut Lcg::new(seed)).kind
    }

    #[test]
    fn human_grants_pending_first() {
        let mut v = view(vec![src("s9", Sensitivity::Sensitive, 3, 0.9)]);
        v.sources[0].pending = true;
        v.unprocessed = vec!["x".into()];
        let p = perms(&ALL, &[Intervention::Authorize]);
        assert_eq!(
            human(&v, &p, &SimHumanProfile::default(), 0),
            ActionKind::Authorize { source: "s9".into(), grant: true }
        );
    }

    #[test]
    fn human_without_interventions_collects() {
        let v = view(vec![src("s1", Sensitivity::Open, 3, 0.5)]);
        let p = perms(&[tasks::COLLECT], &[]);
        assert_eq!(
            human(&v, &p, &SimHumanProfile::default(), 0),
            ActionKind::Collect { source: "s1".into() }
        );
    }

    fn review_view() -> View {
        let mut v = view(vec![src("s1", Sensitivity::Open, 3, 0.5)]);
        v.review = vec![ReviewItem {
            id: "s1-1".into(),
            assigned_class: "h2".into(),
            true_class: "h1".into(),
            true_reliability: 0.7,
        }];
        v
    }

    #[test]
    fn zero_detection_never_corrects() {
        let v = review_view();
        let mut p = perms(&[], &[Intervention::Correct]);
        p.indirect.insert(tasks::PROCESS.into());
        let profile = SimHumanProfile {
            detection_prob: 0.0,
            ..Default::default()
        };
        for seed in 0..200 {
            assert!(!matches!(human(&v, &p, &profile, seed), ActionKind::Correct { .. }));
        }
    }

    #[test]
    fn full_detection_corrects_while_monitoring() {
        let v = review_view();
        let mut p = perms(&[], &[Intervention::Correct]);
        p.indirect.insert(tasks::PROCESS.into());
        let profile = SimHumanProfile {
            detection_prob: 1.0,
            classification_accuracy: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            human(&v, &p, &profile, 3),
            ActionKind::Correct { ref item, ref class, .. } if item == "s1-1" && *class == Label::from("h1")
        ));
        // not monitoring processing: no review
        let p = perms(&[], &[Intervention::Correct]);
        assert_eq!(human(&v, &p, &profile, 3), ActionKind::Idle);
    }

    #[test]
    fn skilled_human_directs_to_richest_source() {
        let v = view(vec![
            src("s1", Sensitivity::Open, 3, 0.3),
            src("s2", Sensitivity::Open, 3, 0.8),
            src("s3", Sensitivity::Sensitive, 3, 0.95),
        ]);
        let p = perms(&[tasks::DIRECT_SRCS], &[]);
        let profile = SimHumanProfile {
            guidance_skill: 1.0,
            ..Default::default()
        };
        for seed in 0..20 {
            assert_eq!(
                human(&v, &p, &profile, seed),
                ActionKind::DirectSrcs { source: "s2".into() }
            );
        }
    }

    #[test]
    fn human_guides_agent_off_weak_source() {
        let mut v = view(vec![
            src("s1", Sensitivity::Open, 3, 0.3),
            src("s2", Sensitivity::Open, 3, 0.5),
            src("s3", Sensitivity::Open, 3, 0.8),
        ]);
        v.agents[0].state.last_source = Some("s1".into());
        let p = perms(&[], &[Intervention::Guide]);
        let profile = SimHumanProfile {
            guidance_skill: 1.0,
            ..Default::default()
        };
        assert_eq!(
            human(&v, &p, &profile, 0),
            ActionKind::Guide { agent: "a".into(), source: "s3".into() }
        );
        v.agents[0].state.last_source = Some("s3".into());
        assert_eq!(human(&v, &p, &profile, 0), ActionKind::Idle);
    }

    #[test]
    fn planners_are_deterministic() {
        let mut v = review_view();
        v.sources.push(src("s2", Sensitivity::Open, 3, 0.9));
        let mut p = perms(&ALL, &Intervention::ALL);
        p.indirect.insert("x".into());
        let profile = SimHumanProfile::default();
        for seed in 0..50 {
            let mut r1 = Lcg::new(seed);
            let mut r2 = Lcg::new(seed);
            assert_eq!(
                plan_sim_human_action("h", &v, &profile, &p, &mut r1),
                plan_sim_human_action("h", &v, &profile, &p, &mut r2)
            );
            assert_eq!(r1, r2);
        }
    }

    #[test]
    fn action_wire_schema() {
        let a: ActionKind =
            serde_json::from_str(r#"{"kind":"authorize","source":"s4","grant":true}"#).unwrap();
        assert_eq!(a, ActionKind::Authorize { source: "s4".into(), grant: true });
        let c: ActionKind =
            serde_json::from_str(r#"{"kind":"correct","item":"s1-2","class":"noise"}"#).unwrap();
        assert!(matches!(c, ActionKind::Correct { reliability: None, .. }));
        assert!(serde_json::from_str::<ActionKind>(r#"{"kind":"teleport"}"#).is_err());
        assert!(serde_json::from_str::<ActionKind>(r#"{"kind":"collect"}"#).is_err());
        let full = Action { actor: "h".into(), kind: ActionKind::Command { name: "go_auto".into() } };
        let s = serde_json::to_string(&full).unwrap();
        assert_eq!(s, r#"{"actor":"h","kind":"command","name":"go_auto"}"#);
        assert_eq!(serde_json::from_str::<Action>(&s).unwrap(), full);
    }
}
