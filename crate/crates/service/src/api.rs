//! Request/response bodies, error mapping, and route handlers.

use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use fracq_core::harness::{Questionnaire, SessionLog};
use fracq_core::learner::{RecencyTrackers, StepPhase};
use fracq_core::{
    ActionCatalog, Algorithm, EmotionLabel, Error as CoreError, Learner, LearnerConfig, QTable,
    SensorReadings, StateId,
};
use serde::{Deserialize, Serialize};

use crate::store::{Session, SessionStore};

#[derive(Debug)]
pub struct AppState {
    pub store: SessionStore,
    pub catalog: Arc<ActionCatalog>,
}

impl AppState {
    pub fn new(store: SessionStore, catalog: Arc<ActionCatalog>) -> Self {
        AppState { store, catalog }
    }
}

impl Default for AppState {
    fn default() -> Self {
        AppState::new(SessionStore::default(), Arc::new(ActionCatalog::default()))
    }
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    Conflict(String),
    Validation(Vec<String>),
    Internal(String),
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind, message, violations) = match self {
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, "not_found", m, Vec::new()),
            ApiError::Conflict(m) => (StatusCode::CONFLICT, "conflict", m, Vec::new()),
            ApiError::Validation(v) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                "validation",
                v.join("; "),
                v,
            ),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", m, Vec::new()),
        };
        let body = ErrorBody {
            error: kind.to_string(),
            message,
            violations,
        };
        (status, Json(body)).into_response()
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Config(v) => ApiError::Validation(v),
            CoreError::Phase(m) => ApiError::Conflict(m.to_string()),
            e @ (CoreError::Reading(_) | CoreError::Questionnaire(_) | CoreError::Catalog(_)) => {
                ApiError::Validation(vec![e.to_string()])
            }
            other => ApiError::Internal(other.to_string()),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::Validation(vec![r.body_text()])
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn not_found(id: &str) -> ApiError {
    ApiError::NotFound(format!("no live session {id:?}"))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CreateSessionRequest {
    pub algorithm: String,
    /// Partial `LearnerConfig`; omitted fields keep their defaults.
    #[serde(default)]
    pub config: Option<serde_json::Value>,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionView {
    pub session_id: String,
    pub algorithm: Algorithm,
    pub phase: StepPhase,
    pub steps_completed: u64,
    pub state: StateId,
    pub q_table: QTable,
    pub trackers: RecencyTrackers,
    pub config: LearnerConfig,
}

impl SessionView {
    fn of(id: &str, learner: &Learner) -> Self {
        SessionView {
            session_id: id.to_string(),
            algorithm: learner.algorithm(),
            phase: learner.phase(),
            steps_completed: learner.steps_completed(),
            state: learner.current_state(),
            q_table: learner.q_table().clone(),
            trackers: learner.trackers().clone(),
            config: learner.config().clone(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BeginResponse {
    pub step_index: u64,
    pub category_id: usize,
    pub action_id: usize,
    pub action_label: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RespondRequest {
    pub talk_length_s: f64,
    pub distance_cm: f64,
    pub emotion: String,
}

impl RespondRequest {
    fn into_readings(self) -> Result<SensorReadings, ApiError> {
        let mut violations = Vec::new();
        let emotion = match self.emotion.parse::<EmotionLabel>() {
            Ok(e) => e,
            Err(e) => {
                violations.push(e.to_string());
                EmotionLabel::NotDetected
            }
        };
        let readings = SensorReadings::new(self.talk_length_s, self.distance_cm, emotion);
        if let Err(e) = readings.validate() {
            violations.push(e.to_string());
        }
        if violations.is_empty() {
            Ok(readings)
        } else {
            Err(ApiError::Validation(violations))
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RespondResponse {
    pub state_after: StateId,
    pub reward: f64,
    pub forgot: bool,
    pub q_table: QTable,
    pub trackers: RecencyTrackers,
    pub n_speak: i32,
}

pub async fn create_session(
    State(app): State<Arc<AppState>>,
    body: Result<Json<CreateSessionRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<SessionView>), ApiError> {
    let Json(req) = body?;
    let mut violations = Vec::new();
    let algorithm = req
        .algorithm
        .parse::<Algorithm>()
        .map_err(|e| violations.push(e.to_string()))
        .ok();
    let mut config = match req.config {
        None => Some(LearnerConfig::default()),
        Some(v) => serde_json::from_value::<LearnerConfig>(v)
            .map_err(|e| violations.push(format!("config: {e}")))
            .ok(),
    };
    if let (Some(cfg), Some(seed)) = (config.as_mut(), req.seed) {
        cfg.seed = seed;
    }
    if let Some(cfg) = &config {
        violations.extend(cfg.problems());
    }
    let (Some(algorithm), Some(config), true) = (algorithm, config, violations.is_empty()) else {
        return Err(ApiError::Validation(violations));
    };

    let learner = Learner::new(algorithm, config, Arc::clone(&app.catalog))?;
    let session = Session::new(learner);
    let view_learner = session.learner.clone();
    let id = app.store.insert(session);
    tracing::info!(session_id = %id, %algorithm, "session created");
    Ok((
        StatusCode::CREATED,
        Json(SessionView::of(&id, &view_learner)),
    ))
}

pub async fn get_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<SessionView> {
    let handle = app.store.get(&id).ok_or_else(|| not_found(&id))?;
    let s = handle.lock();
    Ok(Json(SessionView::of(&id, &s.learner)))
}

pub async fn begin_step(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<BeginResponse> {
    let handle = app.store.get(&id).ok_or_else(|| not_found(&id))?;
    let mut s = handle.lock();
    s.last_active = Instant::now();
    let sel = s.learner.begin_step()?.clone();
    let action_label = s.learner.catalog().action(sel.action_id).label.clone();
    Ok(Json(BeginResponse {
        step_index: sel.step_index,
        category_id: sel.category_id,
        action_id: sel.action_id,
        action_label,
    }))
}

pub async fn submit_response(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<RespondRequest>, JsonRejection>,
) -> ApiResult<RespondResponse> {
    let handle = app.store.get(&id).ok_or_else(|| not_found(&id))?;
    let mut s = handle.lock();
    s.last_active = Instant::now();
    if s.learner.phase() != StepPhase::AwaitingResponse {
        return Err(ApiError::Conflict(
            "no step in progress; begin a step first".into(),
        ));
    }
    let Json(req) = body?;
    let readings = req.into_readings()?;

    let record = s.learner.complete_step(&readings)?;
    let q = s.learner.q_table().clone();
    let response = RespondResponse {
        state_after: record.state_after,
        reward: record.reward,
        forgot: record.forgot,
        q_table: q.clone(),
        trackers: s.learner.trackers().clone(),
        n_speak: record.scores.n_speak,
    };
    s.log.push(record, &q);
    Ok(Json(response))
}

pub async fn get_log(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> ApiResult<SessionLog> {
    let handle = app.store.get(&id).ok_or_else(|| not_found(&id))?;
    let log = handle.lock().log.clone();
    Ok(Json(log))
}

/// Body is optional: empty, `null`, or `{interest, boredom_hardness}`.
pub async fn end_session(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<SessionLog> {
    let questionnaire = if body.iter().all(u8::is_ascii_whitespace) {
        None
    } else {
        serde_json::from_slice::<Option<Questionnaire>>(&body)
            .map_err(|e| ApiError::Validation(vec![format!("questionnaire: {e}")]))?
    };
    if let Some(q) = &questionnaire {
        q.validate()?;
    }
    // validate before removing so a rejected request leaves the session live
    app.store.get(&id).ok_or_else(|| not_found(&id))?;
    let handle = app.store.remove(&id).ok_or_else(|| not_found(&id))?;
    let mut s = handle.lock();
    s.log.questionnaire = questionnaire;
    tracing::info!(session_id = %id, steps = s.log.steps(), "session ended");
    Ok(Json(s.log.clone()))
}

pub async fn get_catalog(State(app): State<Arc<AppState>>) -> Json<ActionCatalog> {
    Json((*app.catalog).clone())
}

pub async fn health() -> &'static str {
    "ok"
}
