//! Batch experiments: many seeds, several patterns, one CSV table.

mod baselines;
mod table;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{default_bindings, Bindings, EngineError, Outcome, Session, SessionConfig};
use crate::pattern::{parse_pattern, presets, validate_pattern, LintConfig, Pattern, PatternError};
use crate::world::{generate_scenario, Scenario, ScenarioConfig, WorldError};

pub use baselines::{
    mislabel_baseline, speed_baseline, write_baselines, MislabelBaseline, SpeedBaseline,
    BASELINE_SEEDS,
};
pub use table::{format_g, ResultRow, ResultsTable, CSV_HEADER};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("pattern `{name}`: {source}")]
    Pattern {
        name: String,
        #[source]
        source: PatternError,
    },
    #[error(transparent)]
    Scenario(#[from] WorldError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScenarioSpec {
    /// A fresh scenario per seed.
    Generate { generate: ScenarioConfig },
    File { file: PathBuf },
    Inline(Box<Scenario>),
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        ScenarioSpec::Generate {
            generate: ScenarioConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternSpec {
    pub name_or_file: String,
    /// Overrides merged over the default bindings.
    #[serde(default)]
    pub bindings: Bindings,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    Range { from: u64, to: u64 },
    List(Vec<u64>),
}

impl Seeds {
    /// Ascending and deduplicated.
    pub fn values(&self) -> Vec<u64> {
        let mut v: Vec<u64> = match self {
            Seeds::Range { from, to } => (*from..=*to).collect(),
            Seeds::List(l) => l.clone(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub scenario: ScenarioSpec,
    pub patterns: Vec<PatternSpec>,
    pub seeds: Seeds,
    #[serde(default = "default_max_ticks")]
    pub max_ticks: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Directory relative file references resolve against.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

fn default_max_ticks() -> u64 {
    SessionConfig::DEFAULT_MAX_TICKS
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = read(path)?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|source| HarnessError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf);
        Ok(cfg)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        match &self.base_dir {
            Some(base) if p.is_relative() => base.join(p),
            _ => p.to_path_buf(),
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.patterns.is_empty() {
            return Err(HarnessError::Config("at least one pattern is required".into()));
        }
        if self.seeds.values().is_empty() {
            return Err(HarnessError::Config("at least one seed is required".into()));
        }
        if self.max_ticks == 0 {
            return Err(HarnessError::Config("max_ticks must be >= 1".into()));
        }
        Ok(())
    }
}

/// Pattern source text for a file path, or for a preset name when no such
/// file exists.
pub fn pattern_source(name_or_file: &str, base: Option<&Path>) -> Result<String, HarnessError> {
    let path = match base {
        Some(b) if Path::new(name_or_file).is_relative() => b.join(name_or_file),
        _ => PathBuf::from(name_or_file),
    };
    if path.is_file() {
        return read(&path);
    }
    presets::pattern_source(name_or_file)
        .map(str::to_string)
        .ok_or_else(|| HarnessError::Config(format!("no pattern file or preset named `{name_or_file}`")))
}

/// Parses and lints with the default severities.
pub fn load_pattern(name_or_file: &str, base: Option<&Path>) -> Result<Pattern, HarnessError> {
    let wrap = |source| HarnessError::Pattern {
        name: name_or_file.to_string(),
        source,
    };
    let p = parse_pattern(&pattern_source(name_or_file, base)?).map_err(wrap)?;
    let report = validate_pattern(&p, &LintConfig::default());
    if report.has_errors() {
        return Err(wrap(PatternError::LintFailure(report)));
    }
    Ok(p)
}

/// Default bindings for `p` with `overrides` laid over them.
pub fn merge_bindings(p: &Pattern, overrides: &Bindings) -> Bindings {
    let mut b = default_bindings(p);
    b.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
    b
}

/// Runs one batch session to completion.
pub fn run_session(
    scenario: &Scenario,
    pattern: &Pattern,
    bindings: &Bindings,
    seed: u64,
    max_ticks: u64,
) -> Result<Session, EngineError> {
    let cfg = SessionConfig::batch(seed).with_max_ticks(max_ticks);
    let mut s = Session::new(scenario.clone(), pattern.clone(), bindings, cfg)?;
    s.run_to_completion();
    Ok(s)
}

fn scenario_for(
    spec: &ScenarioSpec,
    fixed: &Option<Scenario>,
    seed: u64,
) -> Result<Scenario, HarnessError> {
    match (spec, fixed) {
        (_, Some(s)) => Ok(s.clone()),
        (ScenarioSpec::Generate { generate }, None) => Ok(generate_scenario(generate, seed)?),
        _ => unreachable!("file and inline scenarios are loaded up front"),
    }
}

/// Runs every (pattern, seed) pair. Seeds execute in parallel; rows come
/// back in (pattern order, seed ascending).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultsTable, HarnessError> {
    cfg.validate()?;
    let fixed = match &cfg.scenario {
        ScenarioSpec::Generate { generate } => {
            // surface config errors before fanning out
            generate_scenario(generate, 0)?;
            None
        }
        ScenarioSpec::File { file } => {
            let path = cfg.resolve(file);
            let s: Scenario =
                serde_json::from_str(&read(&path)?).map_err(|source| HarnessError::Json {
                    path: path.clone(),
                    source,
                })?;
            s.validate()?;
            Some(s)
        }
        ScenarioSpec::Inline(s) => {
            s.validate()?;
            Some((**s).clone())
        }
    };

    let mut names = Vec::new();
    let mut runs = Vec::new();
    for spec in &cfg.patterns {
        let p = load_pattern(&spec.name_or_file, cfg.base_dir.as_deref())?;
        let bindings = merge_bindings(&p, &spec.bindings);
        names.push(p.name.clone());
        runs.push((p, bindings));
    }

    let seeds = cfg.seeds.values();
    let jobs: Vec<(usize, u64)> = (0..runs.len())
        .flat_map(|i| seeds.iter().map(move |&s| (i, s)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, seed)| {
            let scenario = scenario_for(&cfg.scenario, &fixed, seed)?;
            let (p, b) = &runs[i];
            let s = run_session(&scenario, p, b, seed, cfg.max_ticks)?;
            Ok(ResultRow::new(&names[i], seed, p, &s.outcome()))
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(ResultsTable {
        patterns: names,
        rows,
    })
}

/// Writes the table as CSV.
pub fn emit_results(table: &ResultsTable, path: &Path) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, table.to_csv()).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Per-actor totals split by class, as (human direct, human indirect, agent direct).
pub(crate) fn workload_split(p: &Pattern, o: &Outcome) -> (u32, u32, u32) {
    let humans: BTreeMap<&str, bool> = p
        .actors
        .iter()
        .map(|a| (a.id.as_str(), a.class == crate::pattern::ActorClass::Human))
        .collect();
    let mut out = (0, 0, 0);
    for (id, w) in &o.metrics.workload {
        if humans.get(id.as_str()).copied().unwrap_or(false) {
            out.0 += w.direct_actions;
            out.1 += w.indirect_ticks;
        } else {
            out.2 += w.direct_actions;
        }
    }
    out
}
