//! HTTP API over a read-only store snapshot.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use contribkit::analytics::{compare, stats, StatsOptions, DEFAULT_MIN_COMMON};
use contribkit::diagnostics::{has_errors, Diagnostic};
use contribkit::export::{export, Format};
use contribkit::model::{TaskLabel, Triple, UnitKind};
use contribkit::store::ContributionGraph;
use contribkit::triplify::flatten_with;
use contribkit::validate::{check, Profile};
use contribkit::Error;
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::cors::CorsLayer;

#[derive(Clone)]
struct AppState {
    graph: Arc<ContributionGraph>,
}

pub fn router(graph: ContributionGraph) -> Router {
    Router::new()
        .route("/validate", post(validate))
        .route("/triplify", post(triplify))
        .route("/papers", get(papers))
        .route("/compare", get(compare_papers))
        .route("/stats", get(corpus_stats))
        .layer(CorsLayer::permissive())
        .with_state(AppState {
            graph: Arc::new(graph),
        })
}

pub async fn serve(listener: tokio::net::TcpListener, graph: ContributionGraph) -> std::io::Result<()> {
    axum::serve(listener, router(graph))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

fn error(status: StatusCode, code: &str, message: impl Into<String>) -> Response {
    (status, Json(json!({"error": {"code": code, "message": message.into()}}))).into_response()
}

fn library_error(e: Error) -> Response {
    let status = match e {
        Error::UnknownPaper(_) => StatusCode::NOT_FOUND,
        Error::UnknownUnit(_) | Error::UnsupportedFormat(_) => StatusCode::BAD_REQUEST,
        Error::InvalidDocument(_) => StatusCode::UNPROCESSABLE_ENTITY,
        _ => StatusCode::INTERNAL_SERVER_ERROR,
    };
    error(status, e.code(), e.to_string())
}

#[derive(Debug, Default, Deserialize)]
struct DocumentQuery {
    #[serde(default)]
    fragment: bool,
    format: Option<String>,
}

impl DocumentQuery {
    fn profile(&self) -> Profile {
        if self.fragment {
            Profile::Fragment
        } else {
            Profile::Complete
        }
    }
}

#[derive(Serialize)]
struct Diagnostics {
    diagnostics: Vec<Diagnostic>,
}

/// Parses the body; `Err` is the 400 response for unreadable input.
fn checked(body: &Bytes, profile: Profile) -> Result<(contribkit::AnnotationDocument, Vec<Diagnostic>), Response> {
    let Ok(text) = std::str::from_utf8(body) else {
        return Err(error(StatusCode::BAD_REQUEST, "MALFORMED_JSON", "body is not UTF-8"));
    };
    match check(text, profile) {
        (Some(doc), diagnostics) => Ok((doc, diagnostics)),
        (None, diagnostics) => Err((StatusCode::BAD_REQUEST, Json(Diagnostics { diagnostics })).into_response()),
    }
}

async fn validate(Query(q): Query<DocumentQuery>, body: Bytes) -> Response {
    match checked(&body, q.profile()) {
        Ok((_, diagnostics)) => Json(Diagnostics { diagnostics }).into_response(),
        Err(response) => response,
    }
}

#[derive(Serialize)]
struct Triplified {
    triples: Vec<Triple>,
    /// Warnings that did not block flattening.
    diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    export: Option<String>,
}

async fn triplify(Query(q): Query<DocumentQuery>, body: Bytes) -> Response {
    let format = match q.format.as_deref().map(str::parse::<Format>).transpose() {
        Ok(f) => f,
        Err(e) => return library_error(e),
    };
    let (doc, diagnostics) = match checked(&body, q.profile()) {
        Ok(parsed) => parsed,
        Err(response) => return response,
    };
    if has_errors(&diagnostics) {
        return (StatusCode::UNPROCESSABLE_ENTITY, Json(Diagnostics { diagnostics })).into_response();
    }
    let triples = match flatten_with(&doc, q.profile()) {
        Ok(t) => t,
        Err(e) => return library_error(e),
    };
    let export = match format.map(|f| export(&triples, f)).transpose() {
        Ok(bytes) => bytes.map(|b| String::from_utf8_lossy(&b).into_owned()),
        Err(e) => return library_error(e),
    };
    Json(Triplified { triples, diagnostics, export }).into_response()
}

#[derive(Serialize)]
struct PaperSummary<'a> {
    id: &'a str,
    title: &'a str,
    task: TaskLabel,
    triples: usize,
}

async fn papers(State(state): State<AppState>) -> Response {
    let graph = &state.graph;
    let papers: Vec<PaperSummary> = graph
        .papers()
        .map(|p| PaperSummary {
            id: &p.paper_id,
            title: &p.title,
            task: p.task_label,
            triples: graph.paper_triples(&p.paper_id).len(),
        })
        .collect();
    Json(json!({ "papers": papers })).into_response()
}

#[derive(Debug, Deserialize)]
struct CompareQuery {
    unit: Option<String>,
    ids: Option<String>,
    min_common: Option<usize>,
}

async fn compare_papers(State(state): State<AppState>, Query(q): Query<CompareQuery>) -> Response {
    let Some(unit) = q.unit.as_deref() else {
        return error(StatusCode::BAD_REQUEST, "MISSING_PARAMETER", "unit is required");
    };
    let unit: UnitKind = match unit.parse() {
        Ok(u) => u,
        Err(e) => return library_error(e),
    };
    let ids: Vec<String> = match q.ids.as_deref() {
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect(),
        None => state.graph.papers().map(|p| p.paper_id.clone()).collect(),
    };
    match compare(&state.graph, unit, &ids, q.min_common.unwrap_or(DEFAULT_MIN_COMMON)) {
        Ok(table) => Json(table).into_response(),
        Err(e) => library_error(e),
    }
}

#[derive(Debug, Deserialize)]
struct StatsQuery {
    #[serde(default)]
    min_count: usize,
    exclude_root: Option<bool>,
    exclude_evidence: Option<bool>,
}

async fn corpus_stats(State(state): State<AppState>, Query(q): Query<StatsQuery>) -> Response {
    let defaults = StatsOptions::default();
    let options = StatsOptions {
        min_count: q.min_count,
        exclude_root: q.exclude_root.unwrap_or(defaults.exclude_root),
        exclude_evidence: q.exclude_evidence.unwrap_or(defaults.exclude_evidence),
    };
    Json(stats(&state.graph, options)).into_response()
}
