//! Reference runs whose outputs are checked in under `baselines/`.

use std::fmt::Write;
use std::path::Path;

use rayon::prelude::*;

use super::{format_g, load_pattern, merge_bindings, run_session, HarnessError};
use crate::agents::{AgentProfile, SimHumanProfile};
use crate::engine::{ActorBinding, Bindings, Outcome};
use crate::world::{generate_scenario, ScenarioConfig};

pub const BASELINE_SEEDS: std::ops::RangeInclusive<u64> = 1..=50;

/// (seed, autonomous ticks, manual ticks); undecided runs are `None`.
pub type SpeedRow = (u64, Option<u64>, Option<u64>);

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedBaseline {
    pub rows: Vec<SpeedRow>,
}

impl SpeedBaseline {
    /// Mean over seeds of manual / autonomous ticks_to_decision, over seeds
    /// where both decided.
    pub fn mean_ratio(&self) -> f64 {
        let r: Vec<f64> = self
            .rows
            .iter()
            .filter_map(|&(_, a, m)| Some(m? as f64 / a? as f64))
            .collect();
        r.iter().sum::<f64>() / r.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,autonomous_strict,manual,speedup\n");
        let f = |v: Option<u64>| v.map(|t| t.to_string()).unwrap_or_default();
        for &(seed, a, m) in &self.rows {
            let ratio = a.zip(m).map(|(a, m)| format_g(m as f64 / a as f64));
            let _ = writeln!(out, "{seed},{},{},{}", f(a), f(m), ratio.unwrap_or_default());
        }
        let mean = |sel: fn(&SpeedRow) -> Option<u64>| {
            let xs: Vec<f64> = self.rows.iter().filter_map(sel).map(|t| t as f64).collect();
            format_g(xs.iter().sum::<f64>() / xs.len() as f64)
        };
        let _ = writeln!(
            out,
            "mean,{},{},{}",
            mean(|r| r.1),
            mean(|r| r.2),
            format_g(self.mean_ratio())
        );
        out
    }

    /// Reads the recorded mean speedup back from a `speed.csv`.
    pub fn parse_mean_ratio(csv: &str) -> Option<f64> {
        csv.lines()
            .find(|l| l.starts_with("mean,"))
            .and_then(|l| l.rsplit(',').next())
            .and_then(|v| v.parse().ok())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MislabelBaseline {
    /// (seed, collaborative, autonomous_strict) final mislabel rates.
    pub rows: Vec<(u64, f64, f64)>,
}

impl MislabelBaseline {
    pub fn means(&self) -> (f64, f64) {
        let n = self.rows.len() as f64;
        let c = self.rows.iter().map(|r| r.1).sum::<f64>() / n;
        let a = self.rows.iter().map(|r| r.2).sum::<f64>() / n;
        (c, a)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed,collaborative,autonomous_strict,difference\n");
        for &(seed, c, a) in &self.rows {
            let _ = writeln!(out, "{seed},{},{},{}", format_g(c), format_g(a), format_g(a - c));
        }
        let (c, a) = self.means();
        let _ = writeln!(out, "mean,{},{},{}", format_g(c), format_g(a), format_g(a - c));
        out
    }
}

fn run_pair(
    first: (&str, Bindings),
    second: (&str, Bindings),
    config: &ScenarioConfig,
) -> Result<Vec<(u64, Outcome, Outcome)>, HarnessError> {
    let p1 = load_pattern(first.0, None)?;
    let p2 = load_pattern(second.0, None)?;
    let b1 = merge_bindings(&p1, &first.1);
    let b2 = merge_bindings(&p2, &second.1);
    let seeds: Vec<u64> = BASELINE_SEEDS.collect();
    seeds
        .par_iter()
        .map(|&seed| {
            let scenario = generate_scenario(config, seed)?;
            let max = crate::engine::SessionConfig::DEFAULT_MAX_TICKS;
            let o1 = run_session(&scenario, &p1, &b1, seed, max)?.outcome();
            let o2 = run_session(&scenario, &p2, &b2, seed, max)?.outcome();
            Ok((seed, o1, o2))
        })
        .collect()
}

/// Default scenario, default profiles: autonomous_strict against manual.
pub fn speed_baseline() -> Result<SpeedBaseline, HarnessError> {
    let rows = run_pair(
        ("autonomous_strict", Bindings::new()),
        ("manual", Bindings::new()),
        &ScenarioConfig::default(),
    )?;
    Ok(SpeedBaseline {
        rows: rows
            .into_iter()
            .map(|(s, a, m)| (s, a.metrics.ticks_to_decision, m.metrics.ticks_to_decision))
            .collect(),
    })
}

/// Agent accuracy 0.6 in both patterns; the collaborative analyst spots
/// every mislabel it reviews.
pub fn mislabel_baseline() -> Result<MislabelBaseline, HarnessError> {
    let agent = ActorBinding::Agent(AgentProfile {
        classification_accuracy: 0.6,
        ..AgentProfile::default()
    });
    let human = ActorBinding::SimHuman(SimHumanProfile {
        detection_prob: 1.0,
        ..SimHumanProfile::default()
    });
    let collab = Bindings::from([("a".to_string(), agent.clone()), ("h".to_string(), human)]);
    let auto = Bindings::from([("a".to_string(), agent)]);
    let rows = run_pair(
        ("collaborative", collab),
        ("autonomous_strict", auto),
        &ScenarioConfig::default(),
    )?;
    Ok(MislabelBaseline {
        rows: rows
            .into_iter()
            .map(|(s, c, a)| (s, c.metrics.mislabel_rate_final, a.metrics.mislabel_rate_final))
            .collect(),
    })
}

/// Writes `speed.csv` and `mislabel.csv` into `dir`.
pub fn write_baselines(dir: &Path) -> Result<(SpeedBaseline, MislabelBaseline), HarnessError> {
    let io = |source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let speed = speed_baseline()?;
    let mislabel = mislabel_baseline()?;
    std::fs::write(dir.join("speed.csv"), speed.to_csv()).map_err(io)?;
    std::fs::write(dir.join("mislabel.csv"), mislabel.to_csv()).map_err(io)?;
    Ok((speed, mislabel))
}
