use std::sync::Arc;

use axum::extract::ws::{CloseFrame, Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::response::Response;
use futures::{SinkExt, StreamExt};
use teamsim_core::protocol::{ClientFrame, ServerFrame};
use tokio::sync::broadcast::error::RecvError;

use crate::{AppState, SessionEntry};

/// Close code sent when the session id is unknown.
pub const CLOSE_UNKNOWN_SESSION: u16 = 4404;

pub async fn stream(
    ws: WebSocketUpgrade,
    State(reg): State<AppState>,
    Path(id): Path<String>,
) -> Response {
    let entry = reg.get(&id).ok();
    ws.on_upgrade(move |socket| async move {
        match entry {
            Some(entry) => run(socket, entry).await,
            None => {
                let mut socket = socket;
                let _ = socket
                    .send(Message::Close(Some(CloseFrame {
                        code: CLOSE_UNKNOWN_SESSION,
                        reason: "unknown session".into(),
                    })))
                    .await;
            }
        }
    })
}

fn error_frame(message: String) -> Message {
    let f = ServerFrame::Error { message };
    Message::Text(serde_json::to_string(&f).expect("frames serialize").into())
}

async fn run(socket: WebSocket, entry: Arc<SessionEntry>) {
    let (mut tx, mut rx) = socket.split();
    let (first, mut frames) = entry.subscribe().await;
    if tx.send(Message::Text(first.into())).await.is_err() {
        return;
    }
    entry.start_timer();

    // client frames are handled here; their replies go out through `reply`
    let (reply, mut replies) = tokio::sync::mpsc::unbounded_channel::<Message>();
    let reader_entry = Arc::clone(&entry);
    let mut reader = tokio::spawn(async move {
        while let Some(Ok(msg)) = rx.next().await {
            let text = match msg {
                Message::Text(t) => t.to_string(),
                Message::Binary(b) => String::from_utf8_lossy(&b).into_owned(),
                Message::Close(_) => break,
                _ => continue,
            };
            let err = match serde_json::from_str::<ClientFrame>(&text) {
                Err(e) => Some(format!("malformed frame: {e}")),
                Ok(ClientFrame::Action(a)) => reader_entry.submit(a).await.err().map(|e| e.body.error),
                Ok(ClientFrame::Step { .. }) if reader_entry.tick_interval_ms > 0 => {
                    Some("session steps on a timer; step frames are not accepted".into())
                }
                Ok(ClientFrame::Step { ticks }) => reader_entry.step(ticks).await.err().map(|e| e.body.error),
            };
            if let Some(e) = err {
                if reply.send(error_frame(e)).is_err() {
                    break;
                }
            }
        }
    });

    loop {
        tokio::select! {
            frame = frames.recv() => match frame {
                Ok(text) => {
                    if tx.send(Message::Text(text.as_ref().into())).await.is_err() {
                        break;
                    }
                }
                Err(RecvError::Lagged(_)) => {
                    let snap = entry.resync().await;
                    if tx.send(Message::Text(snap.into())).await.is_err() {
                        break;
                    }
                }
                Err(RecvError::Closed) => break,
            },
            Some(msg) = replies.recv() => {
                if tx.send(msg).await.is_err() {
                    break;
                }
            }
            _ = &mut reader => break,
        }
    }
    reader.abort();
}
