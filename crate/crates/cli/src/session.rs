use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Subcommand};
use teamsim_client::Client;
use teamsim_core::agents::Action;
use teamsim_core::engine::Bindings;
use teamsim_core::protocol::{ClientFrame, CreateSessionRequest, ScenarioSource, ServerFrame};

use crate::EXIT_OK;

#[derive(Debug, Args)]
pub struct SessionCmd {
    /// Server root URL.
    #[arg(long, default_value = "http://127.0.0.1:8080")]
    server: String,
    #[command(subcommand)]
    op: Op,
}

#[derive(Debug, Subcommand)]
enum Op {
    /// Create a live session and print its handle.
    Create {
        /// Preset name or pattern file.
        #[arg(long)]
        pattern: String,
        /// Scenario name known to the server.
        #[arg(long, default_value = "default")]
        scenario: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        tick_interval_ms: u64,
        #[arg(long)]
        max_ticks: Option<u64>,
        #[arg(long)]
        bindings: Option<PathBuf>,
    },
    Snapshot {
        id: String,
    },
    /// Submit an action given as JSON, e.g. '{"actor":"h","kind":"command","name":"go_auto"}'.
    Act {
        id: String,
        action: String,
    },
    /// Advance a manually stepped session and print the frames it produced.
    Step {
        id: String,
        #[arg(long, default_value_t = 1)]
        ticks: u64,
    },
    Log {
        id: String,
    },
    Presets,
}

pub fn run(cmd: SessionCmd) -> anyhow::Result<i32> {
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(op(Client::new(cmd.server), cmd.op))
}

fn print<T: serde::Serialize>(v: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

async fn op(client: Client, op: Op) -> anyhow::Result<i32> {
    match op {
        Op::Create {
            pattern,
            scenario,
            seed,
            tick_interval_ms,
            max_ticks,
            bindings,
        } => {
            let pattern = match std::fs::read_to_string(&pattern) {
                Ok(text) => text,
                Err(_) => pattern,
            };
            let bindings: Bindings = match bindings {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(&p)?)
                    .with_context(|| format!("parsing {}", p.display()))?,
                None => Bindings::new(),
            };
            let req = CreateSessionRequest {
                scenario: ScenarioSource::Named(scenario),
                pattern,
                bindings,
                seed,
                tick_interval_ms,
                max_ticks,
            };
            print(&client.create_session(&req).await?)?;
        }
        Op::Snapshot { id } => print(&client.snapshot(&id).await?)?,
        Op::Act { id, action } => {
            let action: Action = serde_json::from_str(&action).context("parsing action")?;
            print(&client.post_action(&id, &action).await?)?;
        }
        Op::Step { id, ticks } => {
            let mut ws = client.stream(&id).await?;
            // the connect snapshot
            ws.next_frame().await?;
            ws.send(&ClientFrame::Step { ticks }).await?;
            let mut seen = 0;
            while seen < ticks {
                let Some(frame) = ws.next_frame().await? else { break };
                match &frame {
                    ServerFrame::Events { .. } => seen += 1,
                    ServerFrame::Snapshot(v) if v.snapshot.finished => {
                        println!("{}", serde_json::to_string(&frame)?);
                        break;
                    }
                    ServerFrame::Error { message } => anyhow::bail!("{message}"),
                    _ => {}
                }
                println!("{}", serde_json::to_string(&frame)?);
            }
            ws.close().await.ok();
        }
        Op::Log { id } => print!("{}", client.log(&id).await?),
        Op::Presets => {
            let names: Vec<String> = client
                .pattern_presets()
                .await?
                .into_iter()
                .map(|p| p.name)
                .collect();
            print(&serde_json::json!({
                "patterns": names,
                "scenarios": client.scenario_presets().await?,
            }))?;
        }
    }
    Ok(EXIT_OK)
}
