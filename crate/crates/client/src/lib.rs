//! Async client for the session server.

use futures::{SinkExt, StreamExt};
use reqwest::StatusCode;
use serde::de::DeserializeOwned;
use teamsim_core::agents::Action;
use teamsim_core::protocol::{
    ActionAck, ClientFrame, CreateSessionRequest, ErrorBody, PatternPreset, ServerFrame,
    SessionHandle, SessionView,
};
use thiserror::Error;
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

#[derive(Debug, Error)]
pub enum ClientError {
    #[error("http: {0}")]
    Http(#[from] reqwest::Error),
    #[error("server answered {status}: {}", body.error)]
    Api { status: u16, body: ErrorBody },
    #[error("websocket: {0}")]
    Ws(#[from] tokio_tungstenite::tungstenite::Error),
    #[error("unexpected payload: {0}")]
    Json(#[from] serde_json::Error),
}

impl ClientError {
    pub fn status(&self) -> Option<u16> {
        match self {
            ClientError::Api { status, .. } => Some(*status),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, ClientError>;

#[derive(Debug, Clone)]
pub struct Client {
    base: String,
    http: reqwest::Client,
}

async fn decode<T: DeserializeOwned>(resp: reqwest::Response) -> Result<T> {
    let status = resp.status();
    let bytes = resp.bytes().await?;
    if status.is_success() {
        return Ok(serde_json::from_slice(&bytes)?);
    }
    let body = serde_json::from_slice(&bytes).unwrap_or_else(|_| ErrorBody {
        error: String::from_utf8_lossy(&bytes).into_owned(),
        findings: Vec::new(),
    });
    Err(ClientError::Api {
        status: status.as_u16(),
        body,
    })
}

impl Client {
    /// `base` is the server root, e.g. `http://127.0.0.1:8080`.
    pub fn new(base: impl Into<String>) -> Self {
        Self {
            base: base.into().trim_end_matches('/').to_string(),
            http: reqwest::Client::new(),
        }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub async fn create_session(&self, req: &CreateSessionRequest) -> Result<SessionHandle> {
        decode(self.http.post(self.url("/sessions")).json(req).send().await?).await
    }

    pub async fn snapshot(&self, id: &str) -> Result<SessionView> {
        decode(self.http.get(self.url(&format!("/sessions/{id}/snapshot"))).send().await?).await
    }

    pub async fn post_action(&self, id: &str, action: &Action) -> Result<ActionAck> {
        let url = self.url(&format!("/sessions/{id}/actions"));
        decode(self.http.post(url).json(action).send().await?).await
    }

    /// Posts an arbitrary body; for probing the server's validation.
    pub async fn post_raw(&self, path: &str, body: &str) -> Result<(u16, String)> {
        let resp = self
            .http
            .post(self.url(path))
            .header("content-type", "application/json")
            .body(body.to_string())
            .send()
            .await?;
        let status = resp.status().as_u16();
        Ok((status, resp.text().await?))
    }

    pub async fn log(&self, id: &str) -> Result<String> {
        let resp = self.http.get(self.url(&format!("/sessions/{id}/log"))).send().await?;
        if resp.status() != StatusCode::OK {
            return decode::<String>(resp).await;
        }
        Ok(resp.text().await?)
    }

    pub async fn pattern_presets(&self) -> Result<Vec<PatternPreset>> {
        decode(self.http.get(self.url("/presets/patterns")).send().await?).await
    }

    pub async fn scenario_presets(&self) -> Result<Vec<String>> {
        decode(self.http.get(self.url("/presets/scenarios")).send().await?).await
    }

    pub async fn stream(&self, id: &str) -> Result<SessionStream> {
        let ws_base = self.base.replacen("http", "ws", 1);
        let (ws, _) =
            tokio_tungstenite::connect_async(format!("{ws_base}/sessions/{id}/stream")).await?;
        Ok(SessionStream { ws })
    }
}

/// One session's bidirectional frame stream.
pub struct SessionStream {
    ws: WebSocketStream<MaybeTlsStream<TcpStream>>,
}

impl SessionStream {
    pub async fn send(&mut self, frame: &ClientFrame) -> Result<()> {
        self.send_raw(&serde_json::to_string(frame)?).await
    }

    pub async fn send_raw(&mut self, text: &str) -> Result<()> {
        self.ws.send(Message::text(text)).await?;
        Ok(())
    }

    /// Next text frame as sent by the server, or `None` once closed.
    pub async fn next_text(&mut self) -> Result<Option<String>> {
        while let Some(msg) = self.ws.next().await {
            match msg? {
                Message::Text(t) => return Ok(Some(t.to_string())),
                Message::Close(_) => return Ok(None),
                _ => continue,
            }
        }
        Ok(None)
    }

    pub async fn next_frame(&mut self) -> Result<Option<ServerFrame>> {
        match self.next_text().await? {
            Some(t) => Ok(Some(serde_json::from_str(&t)?)),
            None => Ok(None),
        }
    }

    pub async fn close(mut self) -> Result<()> {
        self.ws.close(None).await?;
        Ok(())
    }
}
