use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::http::StatusCode;
use teamsim_core::agents::Action;
use teamsim_core::engine::{
    default_bindings, ActorBinding, Bindings, ReplayInputs, Session, SessionConfig,
};
use teamsim_core::pattern::{parse_pattern, presets, Pattern};
use teamsim_core::protocol::{
    ActionAck, CreateSessionRequest, ScenarioSource, ServerFrame, SessionHandle, SessionStatus,
    SessionView,
};
use teamsim_core::world::{generate_scenario, Scenario, ScenarioConfig};
use tokio::sync::broadcast;

use crate::{ApiError, ServiceConfig};

/// A snapshot frame goes out whenever the tick count reaches a multiple of
/// this, besides state transitions and connects.
pub const SNAPSHOT_EVERY: u64 = 10;

pub struct Registry {
    config: ServiceConfig,
    sessions: Mutex<HashMap<String, Arc<SessionEntry>>>,
}

pub struct SessionEntry {
    pub id: String,
    pub created_at: String,
    pub tick_interval_ms: u64,
    bindings: Bindings,
    session: tokio::sync::Mutex<Session>,
    frames: broadcast::Sender<Arc<str>>,
    timer_started: AtomicBool,
    persisted: AtomicBool,
    log_dir: PathBuf,
}

fn status(s: &Session) -> SessionStatus {
    if s.is_finished() {
        SessionStatus::Finished
    } else {
        SessionStatus::Running
    }
}

impl Registry {
    pub fn new(config: ServiceConfig) -> Self {
        Self {
            config,
            sessions: Mutex::new(HashMap::new()),
        }
    }

    pub fn get(&self, id: &str) -> Result<Arc<SessionEntry>, ApiError> {
        self.sessions
            .lock()
            .expect("registry lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no session `{id}`")))
    }

    /// Names accepted as `scenario`: `default` plus every `*.json` stem in
    /// the scenario directory.
    pub fn scenario_names(&self) -> Vec<String> {
        let mut names = vec!["default".to_string()];
        if let Some(dir) = &self.config.scenario_dir {
            if let Ok(rd) = std::fs::read_dir(dir) {
                let mut found: Vec<String> = rd
                    .filter_map(Result::ok)
                    .map(|e| e.path())
                    .filter(|p| p.extension().is_some_and(|x| x == "json"))
                    .filter_map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()))
                    .filter(|n| n != "default")
                    .collect();
                found.sort();
                names.extend(found);
            }
        }
        names
    }

    fn load_scenario(&self, src: &ScenarioSource, seed: u64) -> Result<Scenario, ApiError> {
        let bad = |e: &dyn std::fmt::Display| ApiError::bad_request(e.to_string());
        let scenario = match src {
            ScenarioSource::Named(name) if name == "default" => {
                generate_scenario(&ScenarioConfig::default(), seed).map_err(|e| bad(&e))?
            }
            ScenarioSource::Named(name) => {
                let path = self
                    .config
                    .scenario_dir
                    .as_ref()
                    .filter(|_| !name.contains(['/', '\\']) && name != "..")
                    .map(|d| d.join(format!("{name}.json")))
                    .filter(|p| p.is_file())
                    .ok_or_else(|| ApiError::not_found(format!("unknown scenario `{name}`")))?;
                let text = std::fs::read_to_string(&path).map_err(|e| bad(&e))?;
                serde_json::from_str(&text).map_err(|e| bad(&e))?
            }
            ScenarioSource::Generate { generate } => {
                generate_scenario(generate, seed).map_err(|e| bad(&e))?
            }
            ScenarioSource::Inline(s) => (**s).clone(),
        };
        scenario.validate().map_err(|e| bad(&e))?;
        Ok(scenario)
    }

    pub fn create(&self, req: CreateSessionRequest) -> Result<SessionHandle, ApiError> {
        let scenario = self.load_scenario(&req.scenario, req.seed)?;
        let pattern = load_pattern(&req.pattern)?;
        let bindings = live_bindings(&pattern, &req.bindings)?;
        let config = SessionConfig::live(req.seed)
            .with_max_ticks(req.max_ticks.unwrap_or(SessionConfig::DEFAULT_MAX_TICKS));
        let session = Session::new(scenario, pattern, &bindings, config)?;

        let id = uuid::Uuid::new_v4().to_string();
        let (frames, _) = broadcast::channel(1024);
        let entry = Arc::new(SessionEntry {
            id: id.clone(),
            created_at: chrono::Utc::now().to_rfc3339(),
            tick_interval_ms: req.tick_interval_ms,
            bindings,
            session: tokio::sync::Mutex::new(session),
            frames,
            timer_started: AtomicBool::new(false),
            persisted: AtomicBool::new(false),
            log_dir: self.config.log_dir.clone(),
        });
        let handle = SessionHandle {
            session_id: id.clone(),
            created_at: entry.created_at.clone(),
            status: status(&entry.session.try_lock().expect("fresh session")),
        };
        if handle.status == SessionStatus::Finished {
            entry.persist(&entry.session.try_lock().expect("fresh session"));
        }
        self.sessions.lock().expect("registry lock").insert(id, entry);
        tracing::info!(session = %handle.session_id, "session created");
        Ok(handle)
    }
}

fn load_pattern(text: &str) -> Result<Pattern, ApiError> {
    let source = presets::pattern_source(text).unwrap_or(text);
    parse_pattern(source).map_err(|e| ApiError::bad_request(e.to_string()))
}

/// Defaults, then the request's overrides; the first declared human becomes
/// the live human unless the request already binds one.
fn live_bindings(p: &Pattern, overrides: &Bindings) -> Result<Bindings, ApiError> {
    let mut b = default_bindings(p);
    b.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
    if !b.values().any(|v| *v == ActorBinding::LiveHuman) {
        let human = p
            .humans()
            .next()
            .ok_or_else(|| ApiError::bad_request("live sessions need a human actor in the pattern"))?;
        b.insert(human.id.clone(), ActorBinding::LiveHuman);
    }
    Ok(b)
}

impl SessionEntry {
    pub fn view(&self, s: &Session) -> SessionView {
        SessionView {
            session_id: self.id.clone(),
            status: status(s),
            snapshot: s.snapshot(),
        }
    }

    fn publish(&self, frame: &ServerFrame) {
        let text: Arc<str> = serde_json::to_string(frame).expect("frames serialize").into();
        // no subscribers is fine
        let _ = self.frames.send(text);
    }

    fn publish_snapshot(&self, s: &Session) {
        self.publish(&ServerFrame::Snapshot(Box::new(self.view(s))));
    }

    pub async fn snapshot(&self) -> SessionView {
        let s = self.session.lock().await;
        self.view(&s)
    }

    pub async fn log_jsonl(&self) -> String {
        self.session.lock().await.log_jsonl()
    }

    /// Subscribes to frames and returns the snapshot to send first. Both
    /// happen under the session lock, so the stream neither misses nor
    /// repeats a frame.
    pub async fn subscribe(&self) -> (String, broadcast::Receiver<Arc<str>>) {
        let s = self.session.lock().await;
        let rx = self.frames.subscribe();
        let first = ServerFrame::Snapshot(Box::new(self.view(&s)));
        (serde_json::to_string(&first).expect("frames serialize"), rx)
    }

    pub async fn resync(&self) -> String {
        let s = self.session.lock().await;
        serde_json::to_string(&ServerFrame::Snapshot(Box::new(self.view(&s))))
            .expect("frames serialize")
    }

    /// Runs up to `ticks` ticks, publishing frames as it goes.
    pub async fn step(&self, ticks: u64) -> Result<(), ApiError> {
        let mut s = self.session.lock().await;
        if s.is_finished() {
            return Err(ApiError::new(StatusCode::CONFLICT, "session has finished"));
        }
        for _ in 0..ticks {
            if s.is_finished() {
                break;
            }
            self.step_locked(&mut s)?;
        }
        Ok(())
    }

    fn step_locked(&self, s: &mut Session) -> Result<(), ApiError> {
        let tick = s.tick();
        let events = s.step()?;
        let transitioned = events.iter().any(|e| e.kind == "state_change");
        self.publish(&ServerFrame::Events { tick, events });
        if transitioned || s.tick().is_multiple_of(SNAPSHOT_EVERY) || s.is_finished() {
            self.publish_snapshot(s);
        }
        if s.is_finished() {
            self.persist(s);
        }
        Ok(())
    }

    pub async fn submit(&self, action: Action) -> Result<ActionAck, ApiError> {
        let mut s = self.session.lock().await;
        let ack = s.submit_human_action(action)?;
        if !ack.events.is_empty() {
            let transitioned = ack.events.iter().any(|e| e.kind == "state_change");
            self.publish(&ServerFrame::Events {
                tick: s.tick(),
                events: ack.events,
            });
            if transitioned {
                self.publish_snapshot(&s);
            }
        }
        Ok(ActionAck {
            accepted: true,
            queued: ack.queued,
            tick: s.tick(),
        })
    }

    /// Starts the tick timer once; sessions with a zero interval never get one.
    pub fn start_timer(self: &Arc<Self>) {
        if self.tick_interval_ms == 0 || self.timer_started.swap(true, Ordering::SeqCst) {
            return;
        }
        let entry = Arc::clone(self);
        tokio::spawn(async move {
            let mut every = tokio::time::interval(Duration::from_millis(entry.tick_interval_ms));
            every.tick().await;
            loop {
                every.tick().await;
                let mut s = entry.session.lock().await;
                if s.is_finished() {
                    break;
                }
                if let Err(e) = entry.step_locked(&mut s) {
                    tracing::warn!(session = %entry.id, "timer step failed: {}", e.body.error);
                    break;
                }
            }
        });
    }

    /// Writes `<id>.jsonl` and `<id>.inputs.json` once the session is over.
    fn persist(&self, s: &Session) {
        if self.persisted.swap(true, Ordering::SeqCst) {
            return;
        }
        let inputs = ReplayInputs {
            scenario: s.scenario().clone(),
            pattern: s.pattern().clone(),
            bindings: self.bindings.clone(),
            config: s.config().clone(),
            schedule: s.schedule().to_vec(),
            until_tick: None,
        };
        let write = |dir: &Path| -> std::io::Result<()> {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{}.jsonl", self.id)), s.log_jsonl())?;
            let json = serde_json::to_string_pretty(&inputs).expect("inputs serialize");
            std::fs::write(dir.join(format!("{}.inputs.json", self.id)), json)
        };
        if let Err(e) = write(&self.log_dir) {
            tracing::error!(session = %self.id, "could not write session log: {e}");
        }
    }
}
