//! HTTP service: execution sessions, dialogue games and stateless analysis
//! endpoints, all under `/v1`.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use tcla_core::af::{AfError, ArgumentId, ArgumentationFramework, Semantics};
use tcla_core::engine::{observables, ExecError, Observables, SchedulingPolicy, Terminal, Trace};
use tcla_core::protocols::{translate_game, DialogueGame, GameStatus, Move, Player, RuleViolation};
use tcla_core::session::{ExecSession, SessionError, StateView};
use tcla_core::syntax::{parse_program, pretty_print, Diagnostic};

use crate::report::{analyze, translate, Analysis, ProtocolKind, TranslateError, Translation};

/// Limits applied to requests.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Ceiling on explored nodes for exhaustive requests.
    pub node_budget: usize,
    /// Ceiling on steps per run or exploration request.
    pub max_bound: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            node_budget: tcla_core::engine::DEFAULT_NODE_BUDGET,
            max_bound: 1000,
        }
    }
}

impl Limits {
    /// Reads `TCLA_NODE_BUDGET` and `TCLA_MAX_BOUND`, keeping defaults for
    /// unset or unparsable values.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        let read = |name: &str| std::env::var(name).ok().and_then(|v| v.parse::<usize>().ok());
        if let Some(n) = read("TCLA_NODE_BUDGET") {
            limits.node_budget = n;
        }
        if let Some(n) = read("TCLA_MAX_BOUND") {
            limits.max_bound = n;
        }
        limits
    }
}

type Shared<T> = Arc<Mutex<T>>;

#[derive(Default)]
struct Registry {
    sessions: Mutex<HashMap<String, Shared<ExecSession>>>,
    games: Mutex<HashMap<String, Shared<DialogueGame>>>,
}

#[derive(Clone)]
pub struct AppState {
    registry: Arc<Registry>,
    limits: Arc<Limits>,
}

impl AppState {
    pub fn new(limits: Limits) -> Self {
        AppState {
            registry: Arc::default(),
            limits: Arc::new(limits),
        }
    }
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("no session {0}")]
    UnknownSession(String),
    #[error("no game {0}")]
    UnknownGame(String),
    #[error("session already terminated with {0}")]
    Terminated(Terminal),
    #[error("program does not parse")]
    Parse(Vec<Diagnostic>),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    IllegalMove(RuleViolation),
    #[error("{0}")]
    Invalid(TranslateError),
    #[error(transparent)]
    Exec(ExecError),
    #[error(transparent)]
    Framework(#[from] AfError),
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Terminated(t) => ApiError::Terminated(t),
            SessionError::Exec(e) => ApiError::Exec(e),
        }
    }
}

impl From<ExecError> for ApiError {
    fn from(e: ExecError) -> Self {
        ApiError::Exec(e)
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError::BadRequest(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let message = self.to_string();
        let (status, body) = match self {
            ApiError::UnknownSession(_) | ApiError::UnknownGame(_) => {
                (StatusCode::NOT_FOUND, json!({"error": "not-found", "message": message}))
            }
            ApiError::Terminated(t) => (
                StatusCode::CONFLICT,
                json!({"error": "terminated", "terminal": t, "message": message}),
            ),
            ApiError::Parse(diagnostics) => (
                StatusCode::BAD_REQUEST,
                json!({"error": "parse", "message": message, "diagnostics": diagnostics}),
            ),
            ApiError::BadRequest(_) | ApiError::Framework(_) => {
                (StatusCode::BAD_REQUEST, json!({"error": "bad-request", "message": message}))
            }
            ApiError::Exec(ExecError::InvalidChoice { index, available }) => (
                StatusCode::BAD_REQUEST,
                json!({"error": "invalid-choice", "index": index, "available": available, "message": message}),
            ),
            ApiError::Exec(_) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": "execution", "message": message}),
            ),
            ApiError::IllegalMove(v) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": "illegal-move", "rule": v.rule(), "violation": v, "message": message}),
            ),
            ApiError::Invalid(TranslateError::Invalid(violations)) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": "invalid-protocol", "violations": violations, "message": message}),
            ),
            ApiError::Invalid(TranslateError::Input { .. }) => {
                (StatusCode::BAD_REQUEST, json!({"error": "bad-request", "message": message}))
            }
            ApiError::Invalid(TranslateError::Protocol(_)) => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({"error": "protocol", "message": message}),
            ),
        };
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Runs blocking engine work off the async executor.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .unwrap_or_else(|e| Err(ApiError::BadRequest(format!("worker failed: {e}"))))
}

fn new_id() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

pub fn router(state: AppState) -> Router {
    let v1 = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(session_state).delete(delete_session))
        .route("/sessions/{id}/state", get(session_state))
        .route("/sessions/{id}/step", post(step_session))
        .route("/sessions/{id}/run", post(run_session))
        .route("/sessions/{id}/trace", get(session_trace))
        .route("/games", post(create_game))
        .route("/games/{id}", get(game_state).delete(delete_game))
        .route("/games/{id}/moves", post(game_move))
        .route("/games/{id}/undo", post(game_undo))
        .route("/games/{id}/program", get(game_program))
        .route("/parse", post(parse))
        .route("/observables", post(explore))
        .route("/analyze", post(analyze_framework))
        .route("/translate", post(translate_protocol))
        .route("/presets", get(presets));
    Router::new().nest("/v1", v1).with_state(state)
}

#[derive(Deserialize)]
struct CreateSession {
    program: String,
    #[serde(default)]
    initial: ArgumentationFramework,
    #[serde(default)]
    policy: SchedulingPolicy,
}

#[derive(Serialize)]
struct Created<T> {
    id: String,
    state: T,
}

fn parsed(text: &str) -> ApiResult<tcla_core::syntax::Program> {
    parse_program(text).map_err(ApiError::Parse)
}

async fn create_session(
    State(app): State<AppState>,
    body: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Created<StateView>>)> {
    let Json(req) = body?;
    let program = parsed(&req.program)?;
    let (session, view) = blocking(move || {
        let session = ExecSession::new(program, req.initial, req.policy)?;
        let view = session.state()?;
        Ok((session, view))
    })
    .await?;
    let id = new_id();
    lock(&app.registry.sessions).insert(id.clone(), Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(Created { id, state: view })))
}

fn session(app: &AppState, id: &str) -> ApiResult<Shared<ExecSession>> {
    lock(&app.registry.sessions)
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::UnknownSession(id.to_owned()))
}

async fn session_state(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<StateView>> {
    let s = session(&app, &id)?;
    blocking(move || Ok(Json(lock(&s).state()?))).await
}

async fn session_trace(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Trace>> {
    let s = session(&app, &id)?;
    let trace = lock(&s).trace();
    Ok(Json(trace))
}

async fn delete_session(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    lock(&app.registry.sessions)
        .remove(&id)
        .map(|_| StatusCode::NO_CONTENT)
        .ok_or(ApiError::UnknownSession(id))
}

#[derive(Deserialize, Default)]
struct StepRequest {
    choice: Option<usize>,
}

/// An empty body is accepted and means "let the policy choose".
fn optional_body<T: Default + for<'de> Deserialize<'de>>(bytes: &[u8]) -> ApiResult<T> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes).map_err(|e| ApiError::BadRequest(format!("invalid JSON body: {e}")))
}

async fn step_session(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: axum::body::Bytes,
) -> ApiResult<Json<StateView>> {
    let req: StepRequest = optional_body(&body)?;
    let s = session(&app, &id)?;
    blocking(move || {
        let mut guard = lock(&s);
        guard.step(req.choice)?;
        Ok(Json(guard.state()?))
    })
    .await
}

#[derive(Deserialize, Default)]
struct RunRequest {
    bound: Option<usize>,
}

#[derive(Serialize)]
struct RunResponse {
    state: StateView,
    trace: Trace,
}

async fn run_session(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: axum::body::Bytes,
) -> ApiResult<Json<RunResponse>> {
    let req: RunRequest = optional_body(&body)?;
    let bound = req.bound.unwrap_or(app.limits.max_bound).min(app.limits.max_bound);
    let s = session(&app, &id)?;
    blocking(move || {
        let mut guard = lock(&s);
        guard.run(bound)?;
        Ok(Json(RunResponse {
            state: guard.state()?,
            trace: guard.trace(),
        }))
    })
    .await
}

#[derive(Deserialize)]
struct CreateGame {
    framework: ArgumentationFramework,
    #[serde(default)]
    history: Vec<Move>,
}

#[derive(Serialize)]
struct GameView {
    status: GameStatus,
    legal_moves: BTreeSet<ArgumentId>,
    history: Vec<Move>,
}

impl GameView {
    fn of(game: &DialogueGame) -> Self {
        GameView {
            status: game.status(),
            legal_moves: game.legal_moves(),
            history: game.history.clone(),
        }
    }
}

#[derive(Serialize)]
struct CreatedGame {
    id: String,
    #[serde(flatten)]
    view: GameView,
}

fn game(app: &AppState, id: &str) -> ApiResult<Shared<DialogueGame>> {
    lock(&app.registry.games)
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::UnknownGame(id.to_owned()))
}

async fn create_game(
    State(app): State<AppState>,
    body: Result<Json<CreateGame>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<CreatedGame>)> {
    let Json(req) = body?;
    let mut game = DialogueGame::new(req.framework);
    for m in req.history {
        game.apply_move(m.argument, m.player).map_err(ApiError::IllegalMove)?;
    }
    let view = GameView::of(&game);
    let id = new_id();
    lock(&app.registry.games).insert(id.clone(), Arc::new(Mutex::new(game)));
    Ok((StatusCode::CREATED, Json(CreatedGame { id, view })))
}

async fn game_state(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<GameView>> {
    let g = game(&app, &id)?;
    let view = GameView::of(&lock(&g));
    Ok(Json(view))
}

async fn delete_game(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<StatusCode> {
    lock(&app.registry.games)
        .remove(&id)
        .map(|_| StatusCode::NO_CONTENT)
        .ok_or(ApiError::UnknownGame(id))
}

#[derive(Deserialize)]
struct MoveRequest {
    argument: String,
    /// Defaults to the player whose turn it is.
    player: Option<Player>,
}

async fn game_move(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Result<Json<MoveRequest>, JsonRejection>,
) -> ApiResult<Json<GameView>> {
    let Json(req) = body?;
    let g = game(&app, &id)?;
    let mut guard = lock(&g);
    let argument = ArgumentId::new(&req.argument)?;
    let player = req.player.unwrap_or_else(|| guard.next_player());
    guard.apply_move(argument, player).map_err(ApiError::IllegalMove)?;
    Ok(Json(GameView::of(&guard)))
}

async fn game_undo(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<GameView>> {
    let g = game(&app, &id)?;
    let mut guard = lock(&g);
    guard.pop();
    Ok(Json(GameView::of(&guard)))
}

async fn game_program(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Translation>> {
    let g = game(&app, &id)?;
    let snapshot = lock(&g).clone();
    let program = translate_game(&snapshot).map_err(|e| ApiError::Invalid(e.into()))?;
    Ok(Json(Translation {
        program: pretty_print(&program),
        verdict: None,
    }))
}

#[derive(Deserialize)]
struct ParseRequest {
    program: String,
}

async fn parse(body: Result<Json<ParseRequest>, JsonRejection>) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    let program = parsed(&req.program)?;
    Ok(Json(json!({
        "program": pretty_print(&program),
        "declarations": program.declarations.len(),
    })))
}

#[derive(Deserialize)]
struct ExploreRequest {
    program: String,
    #[serde(default)]
    initial: ArgumentationFramework,
    bound: usize,
}

async fn explore(
    State(app): State<AppState>,
    body: Result<Json<ExploreRequest>, JsonRejection>,
) -> ApiResult<Json<Observables>> {
    let Json(req) = body?;
    if req.bound > app.limits.max_bound {
        return Err(ApiError::BadRequest(format!(
            "bound {} exceeds the limit {}",
            req.bound, app.limits.max_bound
        )));
    }
    let program = parsed(&req.program)?;
    let budget = app.limits.node_budget;
    blocking(move || Ok(Json(observables(&program, &req.initial, req.bound, budget)?))).await
}

#[derive(Deserialize)]
struct AnalyzeRequest {
    framework: ArgumentationFramework,
    semantics: Semantics,
}

async fn analyze_framework(body: Result<Json<AnalyzeRequest>, JsonRejection>) -> ApiResult<Json<Analysis>> {
    let Json(req) = body?;
    blocking(move || Ok(Json(analyze(&req.framework, req.semantics)?))).await
}

#[derive(Deserialize)]
struct TranslateRequest {
    kind: ProtocolKind,
    input: Value,
    #[serde(default)]
    check: bool,
    bound: Option<usize>,
}

async fn translate_protocol(
    State(app): State<AppState>,
    body: Result<Json<TranslateRequest>, JsonRejection>,
) -> ApiResult<Json<Translation>> {
    let Json(req) = body?;
    let bound = req.bound.unwrap_or(60).min(app.limits.max_bound);
    let check = req.check.then_some((bound, app.limits.node_budget));
    blocking(move || translate(req.kind, req.input, check).map(Json).map_err(ApiError::Invalid)).await
}

async fn presets() -> Json<Value> {
    use tcla_core::presets;
    Json(json!({
        "programs": {
            "table4": presets::TABLE4,
            "example6": presets::EXAMPLE6,
        },
        "debate": presets::fertiliser_debate(),
        "game": presets::vaccine_game(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Violation;

    #[test]
    fn violation_rule_is_reported() {
        let v = Violation::from(&RuleViolation::FirstMoveNotByProponent);
        assert_eq!(v.rule, Some(1));
    }

    #[test]
    fn limits_default_is_bounded() {
        let l = Limits::default();
        assert!(l.max_bound > 0 && l.node_budget > 0);
    }
}
