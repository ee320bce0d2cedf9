//! Stateless HTTP front end.
//!
//! | route            | body                 | reply                     |
//! |------------------|----------------------|---------------------------|
//! | `POST /v1/grade` | [`GradeRequest`]     | [`GradeResponse`]         |
//! | `POST /v1/parse` | [`ParseRequest`]     | [`ParseResponse`]         |
//! | `GET /v1/corpus` |                      | the bundled corpus        |
//! | `GET /healthz`   |                      | `{"status":"ok"}`         |

use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use nile::corpus::{corpus_entries, CorpusEntry};
use nile::parser::render;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{
    alphabet_from, grade, parse_text, request_diagnostic, validate_expr, DiagnosticSource, GradeDiagnostic,
    GradeRequest, GradeResponse,
};

/// Shared, read-only after startup apart from the append-only log.
#[derive(Clone, Default)]
pub struct AppState {
    log: Option<Arc<Mutex<File>>>,
}

impl AppState {
    /// Appends one JSON line per graded request to `path`.
    pub fn with_log(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(AppState { log: Some(Arc::new(Mutex::new(file))) })
    }

    fn record(&self, req: &GradeRequest, resp: &GradeResponse) {
        let Some(log) = &self.log else { return };
        let line = json!({"request": req, "response": resp}).to_string();
        let mut file = log.lock().unwrap_or_else(|e| e.into_inner());
        if let Err(e) = writeln!(file, "{line}") {
            log::warn!("request log write failed: {e}");
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseRequest {
    pub text: String,
    /// When given, the expression is also validated against it.
    #[serde(default)]
    pub alphabet: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseResponse {
    pub ok: bool,
    /// Canonical rendering of the parsed expression.
    pub rendered: Option<String>,
    pub diagnostics: Vec<GradeDiagnostic>,
}

pub fn parse_check(req: &ParseRequest) -> ParseResponse {
    let source = DiagnosticSource::Candidate;
    let checked = parse_text(source, &req.text).and_then(|e| match &req.alphabet {
        None => Ok(e),
        Some(symbols) => {
            let sigma = alphabet_from(symbols).map_err(|m| vec![request_diagnostic(m)])?;
            validate_expr(source, e, &sigma)
        }
    });
    match checked {
        Ok(e) => ParseResponse { ok: true, rendered: Some(render(&e)), diagnostics: Vec::new() },
        Err(diagnostics) => ParseResponse { ok: false, rendered: None, diagnostics },
    }
}

fn bad_json<T: Serialize>(reply: T) -> (StatusCode, Json<T>) {
    (StatusCode::BAD_REQUEST, Json(reply))
}

async fn grade_handler(State(state): State<AppState>, body: Bytes) -> (StatusCode, Json<GradeResponse>) {
    let req: GradeRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return bad_json(GradeResponse::error(vec![request_diagnostic(format!("invalid request: {e}"))])),
    };
    let graded = tokio::task::spawn_blocking(move || {
        let resp = grade(&req);
        state.record(&req, &resp);
        resp
    })
    .await;
    match graded {
        Ok(resp) => (StatusCode::OK, Json(resp)),
        Err(e) => (
            StatusCode::INTERNAL_SERVER_ERROR,
            Json(GradeResponse::error(vec![request_diagnostic(format!("grading failed: {e}"))])),
        ),
    }
}

async fn parse_handler(body: Bytes) -> (StatusCode, Json<ParseResponse>) {
    match serde_json::from_slice::<ParseRequest>(&body) {
        Ok(req) => (StatusCode::OK, Json(parse_check(&req))),
        Err(e) => bad_json(ParseResponse {
            ok: false,
            rendered: None,
            diagnostics: vec![request_diagnostic(format!("invalid request: {e}"))],
        }),
    }
}

async fn corpus_handler() -> Json<&'static [CorpusEntry]> {
    Json(corpus_entries())
}

async fn healthz() -> Json<serde_json::Value> {
    Json(json!({"status": "ok"}))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/v1/grade", post(grade_handler))
        .route("/v1/parse", post(parse_handler))
        .route("/v1/corpus", get(corpus_handler))
        .route("/healthz", get(healthz))
        .with_state(state)
}

/// Serves until the process is stopped.
pub async fn serve(addr: &str, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
