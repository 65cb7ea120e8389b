use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use axum::Json;
use teamsim_core::agents::Action;
use teamsim_core::pattern::presets;
use teamsim_core::protocol::{CreateSessionRequest, PatternPreset};

use crate::{ApiError, AppState};

fn parse<T: serde::de::DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))
}

pub async fn create_session(
    State(reg): State<AppState>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let req: CreateSessionRequest = parse(&body)?;
    let handle = reg.create(req)?;
    Ok((StatusCode::CREATED, Json(handle)))
}

pub async fn snapshot(
    State(reg): State<AppState>,
    Path(id): Path<String>,
) -> Result<impl IntoResponse, ApiError> {
    Ok(Json(reg.get(&id)?.snapshot().await))
}

pub async fn post_action(
    State(reg): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<impl IntoResponse, ApiError> {
    let entry = reg.get(&id)?;
    let action: Action = parse(&body)?;
    let ack = entry.submit(action).await?;
    Ok((StatusCode::ACCEPTED, Json(ack)))
}

pub async fn log(
    State(reg): State<AppState>,
    Path(id): Path<String>,
) -> Result<impl IntoResponse, ApiError> {
    let text = reg.get(&id)?.log_jsonl().await;
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], text))
}

pub async fn pattern_presets() -> Json<Vec<PatternPreset>> {
    Json(
        presets::PATTERNS
            .iter()
            .map(|(name, source)| PatternPreset {
                name: name.to_string(),
                source: source.to_string(),
            })
            .collect(),
    )
}

pub async fn scenario_presets(State(reg): State<AppState>) -> Json<Vec<String>> {
    Json(reg.scenario_names())
}
