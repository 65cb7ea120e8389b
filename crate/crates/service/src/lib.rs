//! Session server: live sessions over HTTP/JSON with a WebSocket event
//! stream per session.

mod error;
mod registry;
mod routes;
mod stream;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;

pub use error::ApiError;
pub use registry::{Registry, SessionEntry, SNAPSHOT_EVERY};

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Scenario JSON files addressable by file stem.
    pub scenario_dir: Option<PathBuf>,
    /// Finished session logs and their replay inputs land here.
    pub log_dir: PathBuf,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            scenario_dir: None,
            log_dir: PathBuf::from("logs"),
        }
    }
}

pub type AppState = Arc<Registry>;

pub fn router(config: ServiceConfig) -> Router {
    let state: AppState = Arc::new(Registry::new(config));
    Router::new()
        .route("/sessions", post(routes::create_session))
        .route("/sessions/{id}/snapshot", get(routes::snapshot))
        .route("/sessions/{id}/actions", post(routes::post_action))
        .route("/sessions/{id}/log", get(routes::log))
        .route("/sessions/{id}/stream", get(stream::stream))
        .route("/presets/patterns", get(routes::pattern_presets))
        .route("/presets/scenarios", get(routes::scenario_presets))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(listener: TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    axum::serve(listener, router(config)).await
}

/// Binds an ephemeral local port and serves in the background.
pub async fn spawn_local(config: ServiceConfig) -> std::io::Result<SocketAddr> {
    let listener = TcpListener::bind(("127.0.0.1", 0)).await?;
    let addr = listener.local_addr()?;
    tokio::spawn(async move {
        if let Err(e) = serve(listener, config).await {
            tracing::error!("server stopped: {e}");
        }
    });
    Ok(addr)
}
