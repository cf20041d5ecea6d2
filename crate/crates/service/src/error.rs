//! Mapping of workflow failures onto HTTP status codes.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use cyclekit::io::LoadErrors;
use cyclekit::network::{DofReport, NetworkError};
use cyclekit::workflow::{SolveReport, WorkflowError};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ApiError {
    /// Request body is not JSON or not a valid model file.
    #[error("{0}")]
    Malformed(LoadErrors),
    #[error("{0}")]
    BadRequest(String),
    #[error("model is not well-posed: {}", .0.status)]
    NotWellPosed(Box<DofReport>),
    #[error("solver did not converge: {}", .0.status)]
    SolverFailed(Box<SolveReport>),
    /// Converged, but to a sizing no hardware could have.
    #[error("{0}")]
    NonPhysical(String),
    #[error("{0}")]
    NotFound(String),
    /// A worker task died; never caused by request content.
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::Malformed(_) | ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::NotWellPosed(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::SolverFailed(_) | ApiError::NonPhysical(_) => StatusCode::CONFLICT,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    fn code(&self) -> &'static str {
        match self {
            ApiError::Malformed(_) => "malformed_model",
            ApiError::BadRequest(_) => "bad_request",
            ApiError::NotWellPosed(_) => "not_well_posed",
            ApiError::SolverFailed(_) => "solver_failed",
            ApiError::NonPhysical(_) => "non_physical_sizing",
            ApiError::NotFound(_) => "not_found",
            ApiError::Internal(_) => "internal",
        }
    }
}

impl From<WorkflowError> for ApiError {
    fn from(e: WorkflowError) -> Self {
        match e {
            WorkflowError::Network(NetworkError::NotWellPosed(r)) => ApiError::NotWellPosed(Box::new(r)),
            WorkflowError::SolverFailed(r) => ApiError::SolverFailed(r),
            e @ WorkflowError::NonPhysicalSizing { .. } => ApiError::NonPhysical(e.to_string()),
            e => ApiError::BadRequest(e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.code(), "message": self.to_string() });
        match &self {
            ApiError::Malformed(errs) => body["details"] = json!(errs),
            ApiError::NotWellPosed(r) => body["report"] = json!(r),
            ApiError::SolverFailed(r) => body["report"] = json!(r),
            _ => {}
        }
        (self.status(), Json(body)).into_response()
    }
}
