//! `teamsim` command line: batch runs, experiments, linting, replay, the
//! session server and a client for it.

mod session;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use teamsim_core::engine::{
    default_bindings, verify_replay, Bindings, EngineError, ReplayInputs, ScheduledAction,
    Session, SessionConfig,
};
use teamsim_core::harness::{
    emit_results, merge_bindings, pattern_source, run_experiment, write_baselines,
    ExperimentConfig, ScenarioSpec,
};
use teamsim_core::pattern::{parse_pattern, validate_pattern, LintConfig, Pattern};
use teamsim_core::world::{generate_scenario, Scenario, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_LINT: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "teamsim", version, about = "Human-agent teaming simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct SessionArgs {
    /// Scenario JSON file, or `default` for the generated default scenario.
    #[arg(long, default_value = "default")]
    scenario: String,
    /// Pattern file or preset name.
    #[arg(long)]
    pattern: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = SessionConfig::DEFAULT_MAX_TICKS)]
    max_ticks: u64,
    /// JSON file of actor bindings laid over the defaults.
    #[arg(long)]
    bindings: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one batch session and write its event log.
    Run {
        #[command(flatten)]
        args: SessionArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment config and write the results table.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a pattern against the lint rules.
    Lint {
        #[arg(long)]
        pattern: String,
        /// Treat warnings as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Re-run a session and compare its log byte for byte.
    Replay {
        #[arg(long)]
        log: PathBuf,
        #[command(flatten)]
        args: Option<SessionArgs>,
        /// Live-human schedule recorded by the server.
        #[arg(long, requires = "pattern")]
        actions: Option<PathBuf>,
        /// Replay inputs file written by the server; replaces the session flags.
        #[arg(long, conflicts_with_all = ["pattern", "actions"])]
        inputs: Option<PathBuf>,
    },
    /// Serve live sessions over HTTP and WebSocket.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long)]
        scenario_dir: Option<PathBuf>,
        #[arg(long, default_value = "logs")]
        log_dir: PathBuf,
    },
    /// Regenerate the reference baselines.
    Baselines {
        #[arg(long, default_value = "baselines")]
        out: PathBuf,
    },
    /// Talk to a running server.
    Session(session::SessionCmd),
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

pub fn exit_code(code: i32) -> ExitCode {
    ExitCode::from(code as u8)
}

fn dispatch(cmd: Command) -> anyhow::Result<i32> {
    match cmd {
        Command::Run { args, out } => cmd_run(&args, &out),
        Command::Experiment { config, out } => cmd_experiment(&config, out),
        Command::Lint { pattern, strict } => cmd_lint(&pattern, strict),
        Command::Replay {
            log,
            args,
            actions,
            inputs,
        } => cmd_replay(&log, args, actions, inputs),
        Command::Serve {
            port,
            scenario_dir,
            log_dir,
        } => cmd_serve(port, scenario_dir, log_dir),
        Command::Baselines { out } => {
            let (speed, mislabel) = write_baselines(&out)?;
            let (c, a) = mislabel.means();
            println!("speed: mean speedup {:.4}", speed.mean_ratio());
            println!("mislabel: collaborative {c:.4}, autonomous_strict {a:.4}");
            Ok(EXIT_OK)
        }
        Command::Session(cmd) => session::run(cmd),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_scenario(arg: &str, seed: u64) -> anyhow::Result<Scenario> {
    if Path::new(arg).is_file() {
        let spec: ScenarioSpec = read_json(Path::new(arg))?;
        let s = match spec {
            ScenarioSpec::Generate { generate } => generate_scenario(&generate, seed)?,
            ScenarioSpec::Inline(s) => *s,
            ScenarioSpec::File { file } => {
                let base = Path::new(arg).parent().unwrap_or(Path::new("."));
                read_json(&base.join(file))?
            }
        };
        s.validate()?;
        return Ok(s);
    }
    if arg == "default" {
        return Ok(generate_scenario(&ScenarioConfig::default(), seed)?);
    }
    bail!("no scenario file `{arg}`")
}

fn load_pattern(arg: &str) -> anyhow::Result<Pattern> {
    Ok(parse_pattern(&pattern_source(arg, None)?)?)
}

fn session_inputs(args: &SessionArgs) -> anyhow::Result<ReplayInputs> {
    let pattern = load_pattern(&args.pattern)?;
    let overrides: Bindings = match &args.bindings {
        Some(p) => read_json(p)?,
        None => Bindings::new(),
    };
    Ok(ReplayInputs {
        scenario: load_scenario(&args.scenario, args.seed)?,
        bindings: merge_bindings(&pattern, &overrides),
        pattern,
        config: SessionConfig::batch(args.seed).with_max_ticks(args.max_ticks),
        schedule: Vec::new(),
        until_tick: None,
    })
}

fn cmd_run(args: &SessionArgs, out: &Path) -> anyhow::Result<i32> {
    let i = session_inputs(args)?;
    let mut s = Session::new(i.scenario, i.pattern, &i.bindings, i.config)?;
    let outcome = s.run_to_completion();
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(out, s.log_jsonl()).with_context(|| format!("writing {}", out.display()))?;
    println!("{}", serde_json::to_string_pretty(&outcome)?);
    Ok(EXIT_OK)
}

fn cmd_experiment(config: &Path, out: Option<PathBuf>) -> anyhow::Result<i32> {
    let cfg = ExperimentConfig::from_file(config)?;
    let out = out
        .or_else(|| cfg.out.clone().map(|o| cfg.base_dir.clone().unwrap_or_default().join(o)))
        .unwrap_or_else(|| PathBuf::from("results.csv"));
    let table = run_experiment(&cfg)?;
    emit_results(&table, &out)?;
    eprintln!("wrote {} rows to {}", table.rows.len(), out.display());
    Ok(EXIT_OK)
}

fn cmd_lint(arg: &str, strict: bool) -> anyhow::Result<i32> {
    let source = pattern_source(arg, None)?;
    let pattern = match parse_pattern(&source) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{arg}: {e}");
            return Ok(EXIT_LINT);
        }
    };
    let config = if strict {
        LintConfig::strict()
    } else {
        LintConfig::default()
    };
    let report = validate_pattern(&pattern, &config);
    for f in &report.findings {
        eprintln!("{arg}: {f}");
    }
    if report.has_errors() {
        return Ok(EXIT_LINT);
    }
    println!("{}: ok ({} warning(s))", pattern.name, report.findings.len());
    Ok(EXIT_OK)
}

fn cmd_replay(
    log: &Path,
    args: Option<SessionArgs>,
    actions: Option<PathBuf>,
    inputs: Option<PathBuf>,
) -> anyhow::Result<i32> {
    let expected =
        std::fs::read_to_string(log).with_context(|| format!("reading {}", log.display()))?;
    let inputs = match (inputs, args) {
        (Some(path), _) => read_json(&path)?,
        (None, Some(args)) => {
            let mut i = session_inputs(&args)?;
            if let Some(path) = actions {
                let schedule: Vec<ScheduledAction> = read_json(&path)?;
                let live = schedule.first().map(|a| a.action.actor.clone());
                if let Some(h) = live {
                    i.bindings = default_bindings(&i.pattern);
                    i.bindings.insert(h, teamsim_core::engine::ActorBinding::LiveHuman);
                    i.config.live_mode = true;
                }
                i.schedule = schedule;
            }
            i
        }
        (None, None) => bail!("replay needs --pattern (and --scenario) or --inputs"),
    };
    match verify_replay(&inputs, &expected) {
        Ok(_) => {
            println!("replay ok: {} events", expected.lines().count());
            Ok(EXIT_OK)
        }
        Err(EngineError::ReplayDivergence { line }) => {
            eprintln!("replay diverged at line {line}");
            Ok(EXIT_DIVERGED)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_serve(port: u16, scenario_dir: Option<PathBuf>, log_dir: PathBuf) -> anyhow::Result<i32> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(("0.0.0.0", port))
            .await
            .with_context(|| format!("binding port {port}"))?;
        eprintln!("listening on {}", listener.local_addr()?);
        teamsim_service::serve(
            listener,
            teamsim_service::ServiceConfig {
                scenario_dir,
                log_dir,
            },
        )
        .await?;
        Ok(EXIT_OK)
    })
}
