use std::fs;
use std::sync::{Arc, Mutex};

use arcbench_core::dsl::MAX_STEPS;
use arcbench_core::{ArcObject, ExamplePair, Grid, Trajectory};
use arcbench_harness::pipelines::Verdict;
use arcbench_harness::report::{REPORT, SUMMARY};
use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::ApiError;
use crate::reviews::{unknown_experiment, Ledger, ReviewItem};
use crate::sessions::{Outcome, SessionEntry, SessionStats, StepResponse};
use crate::tasks::{dsl_palette, DslEntry, PublicTask, TaskSummary};
use crate::App;

type ApiResult<T> = Result<Json<T>, ApiError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload.map(|Json(v)| v).map_err(|e| ApiError::invalid(e.body_text()))
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    q.map(|Query(v)| v).map_err(|e| ApiError::invalid(e.body_text()))
}

pub fn router(app: Arc<App>) -> Router {
    Router::new()
        .route("/tasks", get(list_tasks))
        .route("/tasks/{id}", get(get_task))
        .route("/sessions", post(create_session))
        .route("/sessions/stats", get(session_stats))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/steps", post(post_step))
        .route("/sessions/{id}/complete", post(complete))
        .route("/reviews/next", get(next_review))
        .route("/reviews/ledger", get(review_ledger))
        .route("/reviews/{id}/verdict", post(post_verdict))
        .route("/reports/{experiment}", get(get_report))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "UnknownRoute", "no such endpoint") })
        .with_state(app)
}

async fn list_tasks(State(app): State<Arc<App>>) -> Json<Value> {
    let tasks: Vec<TaskSummary> = app.tasks.iter().map(TaskSummary::of).collect();
    Json(serde_json::json!({ "tasks": tasks }))
}

async fn get_task(State(app): State<Arc<App>>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    let task = app.tasks.get(&id).ok_or_else(|| ApiError::unknown_task(&id))?;
    Ok(Json(serde_json::to_value(PublicTask::of(task)).map_err(|e| ApiError::internal(e.to_string()))?))
}

/// Everything a participant sees. The test output is deliberately absent.
#[derive(Debug, Serialize)]
pub struct SessionView {
    pub session_id: String,
    pub task_id: String,
    pub participant_id: String,
    pub attempt: u32,
    /// `active`, `completed`, `exhausted` or `finalized`.
    pub status: &'static str,
    pub step: usize,
    pub max_steps: usize,
    pub train: Vec<ExamplePair>,
    pub test_input: Grid,
    pub current: Grid,
    pub objects: Vec<ArcObject>,
    pub dsl: Vec<DslEntry>,
    pub trajectory: Trajectory,
    pub outcome: Option<Outcome>,
    pub created_ms: u64,
    pub updated_ms: u64,
}

fn view(app: &App, handle: &Mutex<SessionEntry>) -> Result<SessionView, ApiError> {
    let e = handle.lock().expect("session poisoned");
    let task = app.tasks.get(&e.task_id).ok_or_else(|| ApiError::unknown_task(&e.task_id))?;
    Ok(SessionView {
        session_id: e.session_id.clone(),
        task_id: e.task_id.clone(),
        participant_id: e.participant_id.clone(),
        attempt: e.attempt,
        status: e.status_label(),
        step: e.engine.step_count(),
        max_steps: MAX_STEPS,
        train: task.train.clone(),
        test_input: e.engine.initial().clone(),
        current: e.engine.current().clone(),
        objects: e.engine.objects().objects.clone(),
        dsl: dsl_palette(),
        trajectory: e.engine.trajectory().clone(),
        outcome: e.outcome,
        created_ms: e.created_ms,
        updated_ms: e.updated_ms,
    })
}

#[derive(Debug, Deserialize)]
struct CreateSession {
    task_id: String,
    participant_id: String,
}

async fn create_session(State(app): State<Arc<App>>, payload: Result<Json<CreateSession>, JsonRejection>) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let req = body(payload)?;
    let task = app.tasks.get(&req.task_id).ok_or_else(|| ApiError::unknown_task(&req.task_id))?;
    let handle = app.sessions.create(task, &req.participant_id, app.clock.now_ms())?;
    Ok((StatusCode::CREATED, Json(view(&app, &handle)?)))
}

async fn get_session(State(app): State<Arc<App>>, Path(id): Path<String>) -> ApiResult<SessionView> {
    let handle = app.sessions.get(&id)?;
    Ok(Json(view(&app, &handle)?))
}

async fn session_stats(State(app): State<Arc<App>>) -> ApiResult<SessionStats> {
    app.sessions.stats().map(Json).map_err(|e| ApiError::internal(e.to_string()))
}

#[derive(Debug, Deserialize)]
struct StepRequest {
    call: String,
    /// Steps the client believes were already taken.
    #[serde(default)]
    expected_step: Option<usize>,
}

async fn post_step(State(app): State<Arc<App>>, Path(id): Path<String>, payload: Result<Json<StepRequest>, JsonRejection>) -> ApiResult<StepResponse> {
    let req = body(payload)?;
    let (result, _) = app.sessions.step(&id, &req.call, req.expected_step, app.clock.now_ms())?;
    Ok(Json(result))
}

#[derive(Debug, Serialize)]
struct Completion {
    outcome: Outcome,
    session: SessionView,
}

async fn complete(State(app): State<Arc<App>>, Path(id): Path<String>) -> ApiResult<Completion> {
    let handle = app.sessions.get(&id)?;
    let task_id = handle.lock().expect("session poisoned").task_id.clone();
    let task = app.tasks.get(&task_id).ok_or_else(|| ApiError::unknown_task(&task_id))?;
    let (outcome, handle) = app.sessions.finalize(&id, &task.primary_test().output, app.clock.now_ms())?;
    Ok(Json(Completion { outcome, session: view(&app, &handle)? }))
}

#[derive(Debug, Deserialize)]
struct ReviewerQuery {
    reviewer: String,
}

async fn next_review(State(app): State<Arc<App>>, q: Result<Query<ReviewerQuery>, QueryRejection>) -> ApiResult<ReviewItem> {
    let q = query(q)?;
    app.reviews.next(&q.reviewer, app.clock.now_ms(), &app.tasks).map(Json)
}

#[derive(Debug, Deserialize)]
struct VerdictRequest {
    reviewer: String,
    verdict: Verdict,
    #[serde(default)]
    note: Option<String>,
}

async fn post_verdict(State(app): State<Arc<App>>, Path(id): Path<String>, payload: Result<Json<VerdictRequest>, JsonRejection>) -> ApiResult<ReviewItem> {
    let req = body(payload)?;
    app.reviews.verdict(&id, &req.reviewer, req.verdict, req.note, app.clock.now_ms(), &app.tasks).map(Json)
}

#[derive(Debug, Deserialize)]
struct ExperimentQuery {
    experiment: String,
}

async fn review_ledger(State(app): State<Arc<App>>, q: Result<Query<ExperimentQuery>, QueryRejection>) -> ApiResult<Ledger> {
    let q = query(q)?;
    app.reviews.ledger(&q.experiment).map(Json).ok_or_else(|| unknown_experiment(&q.experiment))
}

#[derive(Debug, Serialize)]
struct ReportView {
    experiment: String,
    summary: Option<Value>,
    report: Option<String>,
    /// Validity ledger including verdicts recorded since the report was written.
    ledger: Option<Ledger>,
}

async fn get_report(State(app): State<Arc<App>>, Path(experiment): Path<String>) -> ApiResult<ReportView> {
    if experiment.is_empty() || experiment.starts_with('.') || experiment.contains(['/', '\\']) {
        return Err(ApiError::invalid(format!("bad experiment name {experiment:?}")));
    }
    let dir = app.reports_dir.join(&experiment);
    if !dir.is_dir() {
        return Err(unknown_experiment(&experiment));
    }
    let summary = match fs::read_to_string(dir.join(SUMMARY)) {
        Ok(t) => Some(serde_json::from_str(&t).map_err(|e| ApiError::internal(format!("{experiment}/{SUMMARY}: {e}")))?),
        Err(_) => None,
    };
    Ok(Json(ReportView { summary, report: fs::read_to_string(dir.join(REPORT)).ok(), ledger: app.reviews.ledger(&experiment), experiment }))
}
