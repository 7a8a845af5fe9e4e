use std::path::PathBuf;

use arcbench_core::task::TaskError;
use arcbench_harness::report::ReportError;
use arcbench_harness::review::ReviewLogError;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use thiserror::Error;

/// Failures while opening the service's stores.
#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("duplicate task id {0}")]
    DuplicateTask(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path} line {line}: {reason}")]
    Log { path: PathBuf, line: usize, reason: String },
    #[error(transparent)]
    Reviews(#[from] ReviewLogError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

/// An error response: `{"code": ..., "message": ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> ApiError {
        ApiError { status, code, message: message.into() }
    }

    pub fn unknown_task(id: &str) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, "UnknownTask", format!("no task {id}"))
    }

    pub fn unknown_session(id: &str) -> ApiError {
        ApiError::new(StatusCode::NOT_FOUND, "UnknownSession", format!("no session {id}"))
    }

    pub fn invalid(message: impl Into<String>) -> ApiError {
        ApiError::new(StatusCode::BAD_REQUEST, "InvalidRequest", message)
    }

    pub fn internal(message: impl Into<String>) -> ApiError {
        let message = message.into();
        log::error!("{message}");
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self)).into_response()
    }
}
