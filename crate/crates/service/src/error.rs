use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use teamsim_core::engine::EngineError;
use teamsim_core::pattern::{Finding, PatternError};
use teamsim_core::protocol::ErrorBody;

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, msg: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                error: msg.into(),
                findings: Vec::new(),
            },
        }
    }

    pub fn bad_request(msg: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, msg)
    }

    pub fn not_found(msg: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, msg)
    }

    pub fn with_findings(mut self, findings: Vec<Finding>) -> Self {
        self.body.findings = findings;
        self
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let msg = e.to_string();
        match e {
            EngineError::SessionFinished => Self::new(StatusCode::CONFLICT, msg),
            EngineError::Pattern(PatternError::LintFailure(report)) => {
                Self::bad_request(msg).with_findings(report.findings)
            }
            _ => Self::bad_request(msg),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
