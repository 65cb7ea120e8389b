use std::path::{Path, PathBuf};
use std::process::Command;

use teamsim_core::pattern::presets;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn teamsim(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_teamsim"))
        .args(args)
        .env("RUST_LOG", "off")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(teamsim(&[]).0, 1);
    assert_eq!(teamsim(&["frobnicate"]).0, 1);
    assert_eq!(teamsim(&["run", "--pattern", "manual"]).0, 1, "missing --out");
    assert_eq!(teamsim(&["lint", "--pattern", "no_such_thing"]).0, 1);
    assert_eq!(teamsim(&["--help"]).0, 0);
    assert_eq!(teamsim(&["--version"]).0, 0);
    assert_eq!(teamsim(&["lint", "--help"]).0, 0);
}

#[test]
fn lint_presets_by_name_and_file() {
    for (name, _) in presets::PATTERNS {
        assert_eq!(teamsim(&["lint", "--pattern", name]).0, 0, "{name}");
        assert_eq!(teamsim(&["lint", "--pattern", &format!("{name}.tdp")]).0, 0, "{name}.tdp");
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.tdp");
    std::fs::write(&bad, "pattern p { actors: human h; state s { } }").unwrap();
    let (code, _, err) = teamsim(&["lint", "--pattern", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("[R4]"), "{err}");
    std::fs::write(&bad, "pattern p {").unwrap();
    assert_eq!(teamsim(&["lint", "--pattern", bad.to_str().unwrap()]).0, 2);
}

#[test]
fn shipped_pattern_files_match_presets() {
    for (name, source) in presets::PATTERNS {
        let file = root().join(format!("presets/patterns/{name}.tdp"));
        assert_eq!(std::fs::read_to_string(&file).unwrap(), source, "{name}");
    }
}

#[test]
fn run_then_replay_and_detect_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("out/log.jsonl");
    let log_s = log.to_str().unwrap();
    let (code, out, _) = teamsim(&[
        "run", "--pattern", "collaborative", "--seed", "7", "--max-ticks", "500", "--out", log_s,
    ]);
    assert_eq!(code, 0);
    let outcome: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(outcome["decided"].is_boolean());
    let args = ["--pattern", "collaborative", "--seed", "7", "--max-ticks", "500"];
    let replay = |path: &str| {
        let mut a = vec!["replay", "--log", path];
        a.extend(args);
        teamsim(&a).0
    };
    assert_eq!(replay(log_s), 0);

    let text = std::fs::read_to_string(&log).unwrap();
    let line = text.lines().position(|l| l.contains("\"kind\":\"process\"")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[line] = lines[line].replacen("\"tick\":", "\"tick\":1", 1);
    let tampered = dir.path().join("tampered.jsonl");
    std::fs::write(&tampered, lines.join("\n") + "\n").unwrap();
    let mut a = vec!["replay", "--log", tampered.to_str().unwrap()];
    a.extend(args);
    let (code, _, err) = teamsim(&a);
    assert_eq!(code, 3);
    assert!(err.contains(&format!("line {}", line + 1)), "{err}");

    // a different seed is a divergence too
    let (code, _, _) = teamsim(&["replay", "--log", log_s, "--pattern", "collaborative", "--seed", "8", "--max-ticks", "500"]);
    assert_eq!(code, 3);
}

#[test]
fn run_accepts_scenario_files_and_bindings() {
    let dir = tempfile::tempdir().unwrap();
    let scen = root().join("presets/scenarios/drone_sighting.json");
    let gen = dir.path().join("gen.json");
    std::fs::write(&gen, r#"{"generate": {"hypotheses": 2, "items_per_source": 4}}"#).unwrap();
    let bindings = dir.path().join("b.json");
    std::fs::write(&bindings, r#"{"a": {"agent": {"classification_accuracy": 0.6}}}"#).unwrap();
    for s in [scen.to_str().unwrap(), gen.to_str().unwrap()] {
        let out = dir.path().join("l.jsonl");
        let (code, _, err) = teamsim(&[
            "run", "--scenario", s, "--pattern", "supervisory", "--bindings",
            bindings.to_str().unwrap(), "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
    }
    assert_eq!(
        teamsim(&["run", "--scenario", "nowhere.json", "--pattern", "manual", "--out", "x"]).0,
        1
    );
}

#[test]
fn experiment_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.json");
    std::fs::write(
        &cfg,
        r#"{"patterns": [{"name_or_file": "manual"}, {"name_or_file": "collaborative"}],
            "seeds": [1, 2, 3], "out": "res/out.csv"}"#,
    )
    .unwrap();
    assert_eq!(teamsim(&["experiment", "--config", cfg.to_str().unwrap()]).0, 0);
    let csv = std::fs::read_to_string(dir.path().join("res/out.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6 + 4);
    let other = dir.path().join("other.csv");
    assert_eq!(
        teamsim(&["experiment", "--config", cfg.to_str().unwrap(), "--out", other.to_str().unwrap()]).0,
        0
    );
    assert_eq!(std::fs::read_to_string(other).unwrap(), csv);

    std::fs::write(&cfg, r#"{"patterns": [], "seeds": [1]}"#).unwrap();
    assert_eq!(teamsim(&["experiment", "--config", cfg.to_str().unwrap()]).0, 1);
}

#[test]
fn session_client_against_live_server() {
    let rt = tokio::runtime::Runtime::new().unwrap();
    let dir = tempfile::tempdir().unwrap();
    let addr = rt
        .block_on(teamsim_service::spawn_local(teamsim_service::ServiceConfig {
            scenario_dir: Some(root().join("presets/scenarios")),
            log_dir: dir.path().to_path_buf(),
        }))
        .unwrap();
    let server = format!("http://{addr}");
    let s = |args: &[&str]| {
        let mut a = vec!["session", "--server", server.as_str()];
        a.extend(args);
        teamsim(&a)
    };
    let (code, out, err) = s(&["create", "--pattern", "phased_autonomy", "--scenario", "drone_sighting", "--seed", "2"]);
    assert_eq!(code, 0, "{err}");
    let handle: serde_json::Value = serde_json::from_str(&out).unwrap();
    let id = handle["session_id"].as_str().unwrap();

    let (code, out, _) = s(&["act", id, r#"{"actor":"h","kind":"command","name":"go_auto"}"#]);
    assert_eq!(code, 0);
    assert!(out.contains("\"queued\": false"));
    let (code, out, _) = s(&["step", id, "--ticks", "6"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.contains("\"type\":\"events\"")).count(), 6);
    let (_, out, _) = s(&["snapshot", id]);
    let snap: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(snap["pattern"]["state"], "autonomous");
    assert_eq!(snap["tick"], 6);
    let (_, out, _) = s(&["log", id]);
    assert!(out.lines().count() > 6);
    let (_, out, _) = s(&["presets"]);
    assert!(out.contains("drone_sighting") && out.contains("phased_autonomy"));
    assert_eq!(s(&["snapshot", "missing"]).0, 1);
}
