//! One line per acceptance criterion; exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use teamsim_core::agents::AgentProfile;
use teamsim_core::engine::audit::unpermitted_actions;
use teamsim_core::engine::{default_bindings, ActorBinding, Session, SessionConfig};
use teamsim_core::harness::{merge_bindings, mislabel_baseline, speed_baseline, SpeedBaseline};
use teamsim_core::pattern::trace::{alphabet, for_each_trajectory, unmediated_switch};
use teamsim_core::pattern::{compile, parse_pattern, presets, validate_pattern, LintConfig, Rule};
use teamsim_core::rng::Lcg;
use teamsim_core::world::{
    generate_scenario, update_belief, BeliefState, GeneratorParams, Label, ScenarioConfig,
    Sensitivity,
};

const DETERMINISM_SESSIONS: usize = 20;
const DETERMINISM_BUDGET_SECS: f64 = 5.0;
const ORACLE_TOL: f64 = 1e-12;
const NORMALIZATION_TOL: f64 = 1e-9;
const NOISELESS_SEEDS: u64 = 100;
const MATCHED_SEEDS: u64 = 50;
const SPEED_RATIO_TOL: f64 = 0.05;
const MISLABEL_MIN_GAP: f64 = 0.1;
const TRACE_DEPTH: usize = 6;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn teamsim(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_teamsim"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .expect("teamsim runs");
    let text = String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr);
    (out.status.code().unwrap_or(-1), text)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn preset(name: &str) -> teamsim_core::pattern::Pattern {
    parse_pattern(presets::pattern_source(name).unwrap()).unwrap()
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let start = Instant::now();
    let mut rng = Lcg::new(2024);
    let names: Vec<&str> = presets::PATTERNS.iter().map(|(n, _)| *n).collect();
    for i in 0..DETERMINISM_SESSIONS {
        let cfg = ScenarioConfig {
            hypotheses: 2 + rng.index(2),
            items_per_source: 5 + rng.index(15) as u32,
            signal_rate: rng.uniform_range(0.4, 0.9),
            ..Default::default()
        };
        let scenario = generate_scenario(&cfg, rng.next_u33()).map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("scenario{i}.json"));
        std::fs::write(&path, serde_json::to_string(&scenario).unwrap()).unwrap();
        let pattern = names[rng.index(names.len())];
        let seed = rng.next_u33().to_string();
        let scen = path.to_str().unwrap();
        let mut logs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("log{i}_{run}.jsonl"));
            let o = out.to_str().unwrap();
            let (code, text) = teamsim(&[
                "run", "--scenario", scen, "--pattern", pattern, "--seed", &seed, "--out", o,
            ]);
            ensure(code == 0, || format!("run exited {code}: {text}"))?;
            logs.push(std::fs::read(&out).unwrap());
        }
        ensure(logs[0] == logs[1] && !logs[0].is_empty(), || {
            format!("session {i} ({pattern}) logs differ")
        })?;
        let log = dir.path().join(format!("log{i}_0.jsonl"));
        let (code, text) = teamsim(&[
            "replay", "--log", log.to_str().unwrap(), "--scenario", scen, "--pattern", pattern,
            "--seed", &seed,
        ]);
        ensure(code == 0, || format!("replay exited {code}: {text}"))?;
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < DETERMINISM_BUDGET_SECS, || format!("took {secs:.2} s"))?;
    Ok(format!("{DETERMINISM_SESSIONS} sessions byte-identical, replay exit 0, {secs:.2} s"))
}

fn belief_oracle() -> Check {
    const H: [&str; 3] = ["attack", "espionage", "false_alarm"];
    let alphabet: Vec<(usize, f64)> = (0..4).flat_map(|l| [0.0, 0.5, 1.0].map(|r| (l, r))).collect();
    let label = |l: usize| if l < 3 { Label::Hypothesis(H[l].into()) } else { Label::Noise };
    let fold = |seq: &[(usize, f64)]| -> Result<BeliefState, String> {
        let mut b = BeliefState::uniform(H);
        for &(l, r) in seq {
            b = update_belief(&b, &label(l), r, 3.0).map_err(|e| e.to_string())?;
            ensure((b.total() - 1.0).abs() <= NORMALIZATION_TOL, || format!("{seq:?} not normalized"))?;
        }
        Ok(b)
    };
    let mut frontier: Vec<Vec<(usize, f64)>> = vec![vec![]];
    let mut checked = 0usize;
    for _len in 0..=5 {
        for seq in &frontier {
            let got = fold(seq)?.probabilities();
            let mut w = [1.0f64; 3];
            for &(l, r) in seq {
                if l < 3 {
                    w[l] *= 1.0 + 2.0 * r;
                }
            }
            let z: f64 = w.iter().sum();
            for k in 0..3 {
                ensure((got[k] - w[k] / z).abs() <= ORACLE_TOL, || format!("{seq:?} off oracle"))?;
            }
            let mut rev = seq.clone();
            rev.reverse();
            let back = fold(&rev)?.probabilities();
            for k in 0..3 {
                ensure((got[k] - back[k]).abs() <= ORACLE_TOL, || format!("{seq:?} order-dependent"))?;
            }
            checked += 1;
        }
        frontier = frontier
            .iter()
            .flat_map(|s| alphabet.iter().map(move |e| [s.clone(), vec![*e]].concat()))
            .collect();
    }
    Ok(format!("{checked} sequences within {ORACLE_TOL:e}"))
}

fn noiseless() -> Check {
    let cfg = ScenarioConfig {
        signal_rate: 1.0,
        items_per_source: 50,
        generator: GeneratorParams {
            tau: 0.9,
            reliability_spread: 0.0,
            ..Default::default()
        },
        ..Default::default()
    };
    let p = preset("autonomous_strict");
    let agent = ActorBinding::Agent(AgentProfile {
        classification_accuracy: 1.0,
        ..Default::default()
    });
    let b = merge_bindings(&p, &[("a".to_string(), agent)].into());
    let mut right = 0;
    for seed in 1..=NOISELESS_SEEDS {
        let s = generate_scenario(&cfg, seed).map_err(|e| e.to_string())?;
        let mut session =
            Session::new(s, p.clone(), &b, SessionConfig::batch(seed)).map_err(|e| e.to_string())?;
        let o = session.run_to_completion();
        if o.decided && o.correct {
            right += 1;
        }
    }
    ensure(right == NOISELESS_SEEDS, || format!("{right}/{NOISELESS_SEEDS} correct"))?;
    Ok(format!("{right}/{NOISELESS_SEEDS} seeds decide ground truth"))
}

fn speed() -> Check {
    let b = speed_baseline().map_err(|e| e.to_string())?;
    ensure(b.rows.len() as u64 == MATCHED_SEEDS, || "wrong seed count".into())?;
    for &(seed, a, m) in &b.rows {
        let (a, m) = (a.ok_or(format!("seed {seed}: autonomous undecided"))?, m.unwrap_or(u64::MAX));
        ensure(a < m, || format!("seed {seed}: autonomous {a} >= manual {m}"))?;
    }
    let csv = std::fs::read_to_string(root().join("baselines/speed.csv")).map_err(|e| e.to_string())?;
    let recorded = SpeedBaseline::parse_mean_ratio(&csv).ok_or("no mean row in speed.csv")?;
    let now = b.mean_ratio();
    let rel = (now - recorded).abs() / recorded;
    ensure(rel <= SPEED_RATIO_TOL, || format!("ratio {now} vs recorded {recorded}"))?;
    Ok(format!("faster on {MATCHED_SEEDS}/{MATCHED_SEEDS} seeds, mean speedup {now:.4} (recorded {recorded}, tol ±5%)"))
}

fn violations() -> Check {
    // few items per source, so open sources can run dry before a decision
    let scarce = ScenarioConfig {
        items_per_source: 3,
        ..Default::default()
    };
    let auto = preset("autonomous_strict");
    let (mut applicable, mut flagged) = (0, 0);
    for seed in 1..=MATCHED_SEEDS {
        let scenario = generate_scenario(&scarce, seed).map_err(|e| e.to_string())?;
        ensure(
            scenario
                .sources
                .iter()
                .any(|s| s.sensitivity == Sensitivity::Sensitive
                    && scenario.sources.iter().all(|o| o.signal_rate <= s.signal_rate)),
            || format!("seed {seed}: no sensitive signal source"),
        )?;
        let mut s = Session::new(scenario.clone(), auto.clone(), &default_bindings(&auto), SessionConfig::batch(seed))
            .map_err(|e| e.to_string())?;
        let o = s.run_to_completion();
        // tick at which every discovered open source had been drained
        let open: Vec<&str> = scenario
            .sources
            .iter()
            .filter(|x| x.sensitivity == Sensitivity::Open && s.source_status()[&x.id].discovered)
            .map(|x| x.id.as_str())
            .collect();
        let drained = open
            .iter()
            .all(|id| s.source_status()[*id].taken == scenario.capacity(id));
        // last tick any open-source item was collected or processed
        let open_item = |e: &teamsim_core::engine::SimEvent| {
            let src = match e.kind.as_str() {
                "collect" => e.payload["source"].as_str().map(String::from),
                "process" => e.payload["item"]
                    .as_str()
                    .and_then(|i| s.items().iter().find(|x| x.id == i))
                    .map(|x| x.source_id.clone()),
                _ => None,
            };
            src.is_some_and(|id| open.contains(&id.as_str()))
        };
        let last_open_use = s
            .log()
            .iter()
            .filter(|e| e.is_executed_action() && open_item(e))
            .map(|e| e.tick)
            .max()
            .unwrap_or(0);
        let before_decision = o.metrics.ticks_to_decision.is_none_or(|t| last_open_use + 1 < t);
        if drained && before_decision {
            applicable += 1;
            ensure(o.metrics.violations >= 1, || format!("seed {seed}: exhausted, no violation"))?;
            flagged += 1;
        }
        let default = generate_scenario(&ScenarioConfig::default(), seed).map_err(|e| e.to_string())?;
        for (name, scenario) in [
            ("manual", &scenario),
            ("collaborative", &scenario),
            ("manual", &default),
            ("collaborative", &default),
        ] {
            let p = preset(name);
            let mut s = Session::new(scenario.clone(), p.clone(), &default_bindings(&p), SessionConfig::batch(seed))
                .map_err(|e| e.to_string())?;
            let v = s.run_to_completion().metrics.violations;
            ensure(v == 0, || format!("seed {seed}: {name} has {v} violations"))?;
        }
    }
    ensure(applicable > 0, || "no seed exhausted its open sources".into())?;
    Ok(format!(
        "autonomous_strict violates on {flagged}/{applicable} exhausted seeds; manual and collaborative 0 on {MATCHED_SEEDS} seeds of both scenarios"
    ))
}

fn mislabel() -> Check {
    let b = mislabel_baseline().map_err(|e| e.to_string())?;
    let (c, a) = b.means();
    ensure(c < a && a - c > MISLABEL_MIN_GAP, || format!("collaborative {c} vs autonomous {a}"))?;
    let recorded = std::fs::read_to_string(root().join("baselines/mislabel.csv")).map_err(|e| e.to_string())?;
    ensure(recorded == b.to_csv(), || "baselines/mislabel.csv does not match a fresh run".into())?;
    Ok(format!("collaborative {c:.6} < autonomous_strict {a:.6}, gap {:.6}, baseline exact", a - c))
}

fn lint() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in ["phased_autonomy", "supervisory", "highly_autonomous", "collaborative", "manual"] {
        let file = root().join(format!("presets/patterns/{name}.tdp"));
        let (code, text) = teamsim(&["lint", "--pattern", file.to_str().unwrap(), "--strict"]);
        ensure(code == 0, || format!("{name}: exit {code}: {text}"))?;
    }
    let r1 = presets::PHASED_AUTONOMY.replace(
        "initial manual;",
        "transition manual -> autonomous on command(\"jump\");\n    initial manual;",
    );
    let r2 = presets::PHASED_AUTONOMY.replace(
        "        allocate h -> direct_srcs [indirect];\n        allocate h -> collect [indirect];\n        allocate h -> process [indirect];\n        interventions h: authorize;\n    }\n    state handover_to_manual",
        "        interventions h: authorize;\n    }\n    state handover_to_manual",
    );
    ensure(r2 != presets::PHASED_AUTONOMY, || "R2 mutant not applied".into())?;
    for (rule, src, lenient_exit) in [(Rule::R1, &r1, 2), (Rule::R2, &r2, 0)] {
        let p = parse_pattern(src).map_err(|e| e.to_string())?;
        let rules = validate_pattern(&p, &LintConfig::default()).rules();
        ensure(rules.iter().eq([rule].iter()), || format!("{rule} mutant flagged {rules:?}"))?;
        let file = dir.path().join(format!("{rule}.tdp"));
        std::fs::write(&file, src).unwrap();
        let f = file.to_str().unwrap();
        let (code, _) = teamsim(&["lint", "--pattern", f]);
        ensure(code == lenient_exit, || format!("{rule} mutant: lint exit {code}"))?;
        let (code, text) = teamsim(&["lint", "--pattern", f, "--strict"]);
        ensure(code == 2, || format!("{rule} mutant: strict exit {code}"))?;
        ensure(text.contains(&format!("[{rule}]")), || format!("{rule} not reported: {text}"))?;
    }
    Ok("5 presets clean; R1 mutant -> R1 (exit 2); R2 mutant -> R2 warning, --strict exit 2".into())
}

fn trace() -> Check {
    let p = preset("phased_autonomy");
    let m = compile(p.clone()).map_err(|e| e.to_string())?;
    let (mut total, mut both, mut bad) = (0usize, 0usize, 0usize);
    for_each_trajectory(&m, &alphabet(&p), TRACE_DEPTH, &mut |t| {
        total += 1;
        if t.iter().any(|s| s == "manual") && t.iter().any(|s| s == "autonomous") {
            both += 1;
            if unmediated_switch(&p, t, "manual", "autonomous") {
                bad += 1;
            }
        }
    });
    ensure(bad == 0 && both > 0, || format!("{bad} unmediated of {both}"))?;
    Ok(format!("{total} trajectories, {both} visit both modes, all mediated"))
}

fn permissions() -> Check {
    let (mut sessions, mut actions) = (0, 0);
    for (name, _) in presets::PATTERNS {
        let p = preset(name);
        for seed in 1..=MATCHED_SEEDS {
            let scenario = generate_scenario(&ScenarioConfig::default(), seed).map_err(|e| e.to_string())?;
            let mut s = Session::new(scenario, p.clone(), &default_bindings(&p), SessionConfig::batch(seed))
                .map_err(|e| e.to_string())?;
            s.run_to_completion();
            let bad = unpermitted_actions(&p, s.log());
            ensure(bad.is_empty(), || format!("{name} seed {seed}: {bad:?}"))?;
            sessions += 1;
            actions += s.log().iter().filter(|e| e.is_executed_action()).count();
        }
    }
    Ok(format!("{actions} executed actions over {sessions} sessions, 0 unpermitted"))
}

fn main() {
    let checks: [Criterion; 9] = [
        ("determinism_replay", determinism),
        ("belief_oracle", belief_oracle),
        ("noiseless_correctness", noiseless),
        ("speed_ordering", speed),
        ("sensitive_access_violations", violations),
        ("mislabel_correction", mislabel),
        ("lint_suite", lint),
        ("trace_handover_property", trace),
        ("permission_soundness", permissions),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
