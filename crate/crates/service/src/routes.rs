//! Route handlers. Bodies are parsed by hand so that every malformed
//! request maps to 400 rather than the extractor's own status codes.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cyclekit::fluids::FluidDatabase;
use cyclekit::io::{model_to_json, parse_model, LoadError, LoadErrors};
use cyclekit::network::{validate, Model};
use cyclekit::solver::{linspace, sweep, SweepTable};
use cyclekit::workflow::{run_design, run_offdesign, SolveReport};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use tower_http::cors::CorsLayer;

use crate::error::ApiError;
use crate::palette::{palette, FamilyEntry};
use crate::sweeps::{Job, Jobs};

/// Upper bound on points per sweep request.
const MAX_SWEEP_POINTS: usize = 1000;

#[derive(Clone)]
struct AppState {
    jobs: Jobs,
    db: Arc<FluidDatabase>,
}

/// Routes backed by the built-in fluid database.
pub fn router() -> Router {
    router_with_database(FluidDatabase::builtin())
}

/// Routes whose model files resolve species against `db`.
pub fn router_with_database(db: FluidDatabase) -> Router {
    let state = AppState { jobs: Jobs::default(), db: Arc::new(db) };
    let api = Router::new()
        .route("/components", get(components))
        .route("/models/validate", post(validate_model))
        .route("/design", post(design))
        .route("/simulate", post(simulate))
        .route("/sweep", post(start_sweep))
        .route("/sweeps/{id}", get(sweep_status))
        .with_state(state);
    Router::new().nest("/api/v1", api.clone()).nest("/api", api).layer(CorsLayer::permissive())
}

fn body_json<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| {
        ApiError::Malformed(LoadErrors(vec![LoadError::ParseError { line: e.line(), column: e.column(), message: e.to_string() }]))
    })
}

fn model_from(text: &str, db: &FluidDatabase) -> Result<Model, ApiError> {
    parse_model(text, db).map_err(ApiError::Malformed)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError::Internal(e.to_string()))
}

async fn components() -> Json<Vec<FamilyEntry>> {
    Json(palette())
}

async fn validate_model(State(s): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let model = model_from(text, &s.db)?;
    let report = validate(&model);
    if !report.is_solvable() {
        return Err(ApiError::NotWellPosed(Box::new(report)));
    }
    Ok(Json(report).into_response())
}

#[derive(Serialize)]
struct DesignResponse {
    sized: serde_json::Value,
    report: SolveReport,
}

async fn design(State(s): State<AppState>, body: Bytes) -> Result<Json<DesignResponse>, ApiError> {
    let text = std::str::from_utf8(&body).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let model = model_from(text, &s.db)?;
    let out = blocking(move || run_design(&model, &model.solver)).await??;
    let sized = serde_json::from_str(&model_to_json(&out.sized)).map_err(|e| ApiError::Internal(e.to_string()))?;
    Ok(Json(DesignResponse { sized, report: out.report }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateRequest {
    model: Box<RawValue>,
    #[serde(default)]
    overrides: BTreeMap<String, f64>,
}

async fn simulate(State(s): State<AppState>, body: Bytes) -> Result<Json<SolveReport>, ApiError> {
    let req: SimulateRequest = body_json(&body)?;
    let model = model_from(req.model.get(), &s.db)?;
    let report = blocking(move || run_offdesign(&model, &req.overrides, &model.solver)).await??;
    if !report.converged() {
        return Err(ApiError::SolverFailed(Box::new(report)));
    }
    Ok(Json(report))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRequest {
    model: Box<RawValue>,
    param: String,
    #[serde(default)]
    values: Option<Vec<f64>>,
    #[serde(default)]
    from: Option<f64>,
    #[serde(default)]
    to: Option<f64>,
    #[serde(default)]
    steps: Option<usize>,
    /// Return 202 with a job id instead of waiting for the table.
    #[serde(default)]
    background: bool,
}

impl SweepRequest {
    fn points(&self) -> Result<Vec<f64>, ApiError> {
        let values = match (&self.values, self.from, self.to, self.steps) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) if n <= MAX_SWEEP_POINTS => linspace(a, b, n),
            (None, Some(_), Some(_), Some(n)) => {
                return Err(ApiError::BadRequest(format!("{n} steps exceeds the limit of {MAX_SWEEP_POINTS}")))
            }
            _ => return Err(ApiError::BadRequest("give either values or from, to and steps".into())),
        };
        if values.is_empty() || values.len() > MAX_SWEEP_POINTS || values.iter().any(|v| !v.is_finite()) {
            return Err(ApiError::BadRequest(format!("sweep needs 1 to {MAX_SWEEP_POINTS} finite values")));
        }
        Ok(values)
    }
}

#[derive(Serialize)]
struct SweepStarted {
    id: u64,
    total: usize,
    poll: String,
}

async fn start_sweep(State(s): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: SweepRequest = body_json(&body)?;
    let values = req.points()?;
    let model = model_from(req.model.get(), &s.db)?;
    // Mode and target checks run before any solve.
    sweep(&model, &req.param, &[], &model.solver, &mut |_, _| {})?;
    let report = validate(&model);
    if !report.is_solvable() {
        return Err(ApiError::NotWellPosed(Box::new(report)));
    }
    let param = req.param;
    if !req.background {
        let table: SweepTable = blocking(move || sweep(&model, &param, &values, &model.solver, &mut |_, _| {})).await??;
        return Ok(Json(table).into_response());
    }
    let total = values.len();
    let id = s.jobs.start(&param, total);
    let jobs = s.jobs.clone();
    tokio::task::spawn_blocking(move || {
        let outcome = sweep(&model, &param, &values, &model.solver, &mut |i, _| jobs.progress(id, i));
        jobs.finish(id, outcome.map_err(|e| e.to_string()));
    });
    let poll = format!("/api/v1/sweeps/{id}");
    let started = SweepStarted { id, total, poll: poll.clone() };
    Ok((StatusCode::ACCEPTED, [(header::LOCATION, poll)], Json(started)).into_response())
}

async fn sweep_status(State(s): State<AppState>, Path(id): Path<String>) -> Result<Json<Job>, ApiError> {
    let id: u64 = id.parse().map_err(|_| ApiError::BadRequest(format!("sweep id {id:?} is not a number")))?;
    s.jobs.get(id).map(Json).ok_or_else(|| ApiError::NotFound(format!("no sweep with id {id}")))
}
