use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use cxrlabel_core::classify::{FindingId, SentenceTag, TagCategory};
use cxrlabel_core::events::{EventPayload, RatingLabel, StudyRating, TagEvent};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::App;

const RATER_HEADER: &str = "x-rater-id";

#[derive(Debug)]
pub(crate) enum ApiError {
    BadRequest(String),
    Unprocessable(String),
    NotFound(String),
    Unavailable(String),
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, code, detail) = match self {
            ApiError::BadRequest(d) => (StatusCode::BAD_REQUEST, "bad_request", d),
            ApiError::Unprocessable(d) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid", d),
            ApiError::NotFound(d) => (StatusCode::NOT_FOUND, "not_found", d),
            ApiError::Unavailable(d) => (StatusCode::SERVICE_UNAVAILABLE, "unavailable", d),
            ApiError::Internal(d) => (StatusCode::INTERNAL_SERVER_ERROR, "internal", d),
        };
        (status, Json(json!({ "error": code, "detail": detail }))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Default, Deserialize)]
struct RaterQuery {
    rater: Option<String>,
}

/// Rater from the body, then the query string, then the header.
fn rater_of(body: Option<&str>, query: &RaterQuery, headers: &HeaderMap) -> Option<String> {
    body.filter(|r| !r.is_empty())
        .map(str::to_string)
        .or_else(|| query.rater.clone().filter(|r| !r.is_empty()))
        .or_else(|| {
            headers
                .get(RATER_HEADER)
                .and_then(|v| v.to_str().ok())
                .map(|v| v.trim().to_string())
                .filter(|r| !r.is_empty())
        })
}

fn require_rater(rater: Option<String>) -> ApiResult<String> {
    rater.ok_or_else(|| {
        ApiError::Unprocessable(format!("rater missing: use ?rater=, the {RATER_HEADER} header or rater_id"))
    })
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(e.to_string()))
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

pub fn router(app: App) -> Router {
    let mut r = Router::new()
        .route("/api/sentences/next", get(next_sentence))
        .route("/api/sentences/tag", post(submit_tag))
        .route("/api/findings", get(findings))
        .route("/api/eval/{set_id}/next", get(next_eval_study))
        .route("/api/eval/{set_id}/rating", post(submit_rating))
        .route("/api/progress", get(progress))
        .route("/api/export/ratings", get(export_ratings))
        .route("/api/export/tags", get(export_tags));
    if let Some(dir) = &app.inner.image_dir {
        r = r.nest_service("/images", ServeDir::new(dir));
    }
    r.with_state(app)
}

impl App {
    /// Append an event built from the next id, then apply it to the state.
    async fn commit(&self, rater: String, payload: EventPayload) -> ApiResult<u64> {
        let mut log = self.inner.log.lock().await;
        let event_id = self.inner.state.read().expect("state lock").next_event_id();
        let event = TagEvent {
            event_id,
            rater_id: rater,
            received_at: now_ms(),
            payload,
        };
        log.append(&event).map_err(|e| ApiError::Internal(e.to_string()))?;
        self.inner.state.write().expect("state lock").apply(&event);
        Ok(event_id)
    }
}

async fn next_sentence(
    State(app): State<App>,
    Query(q): Query<RaterQuery>,
    headers: HeaderMap,
) -> ApiResult<Json<Value>> {
    let inner = &app.inner;
    let queue = inner
        .queue
        .as_deref()
        .ok_or_else(|| ApiError::Unavailable("no sentence pool loaded".into()))?;
    let rater = rater_of(None, &q, &headers);
    let rater = match inner.coverage {
        crate::QueueCoverage::Single => rater.unwrap_or_default(),
        crate::QueueCoverage::PerRater => require_rater(rater)?,
    };
    let state = inner.state.read().expect("state lock");
    Ok(Json(match state.next_sentence(queue, &rater, inner.coverage) {
        None => json!({ "done": true }),
        Some((rank, entry, remaining)) => json!({
            "done": false,
            "canonical_text": entry.text,
            "rank": rank,
            "report_count": entry.report_count,
            "occurrence_count": entry.occurrence_count,
            "remaining": remaining,
        }),
    }))
}

#[derive(Debug, Deserialize)]
struct TagBody {
    canonical_text: String,
    category: TagCategory,
    #[serde(default)]
    findings: Vec<String>,
    #[serde(default)]
    rater_id: Option<String>,
}

async fn submit_tag(
    State(app): State<App>,
    Query(q): Query<RaterQuery>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let body: TagBody = parse_body(&body)?;
    let rater = require_rater(rater_of(body.rater_id.as_deref(), &q, &headers))?;
    let raw = SentenceTag {
        canonical_text: body.canonical_text,
        category: body.category,
        findings: body.findings,
        rater_id: rater.clone(),
        timestamp: now_ms(),
    };
    let resolved = raw
        .resolve(&app.inner.ontology)
        .map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    let tag = SentenceTag {
        canonical_text: resolved.canonical_text.clone(),
        category: resolved.category,
        findings: resolved
            .findings
            .iter()
            .map(|f| app.inner.ontology.name(f).to_string())
            .collect(),
        rater_id: rater.clone(),
        timestamp: raw.timestamp,
    };
    let event_id = app.commit(rater, EventPayload::SentenceTag(tag)).await?;
    Ok(Json(json!({ "event_id": event_id, "canonical_text": resolved.canonical_text })))
}

async fn findings(State(app): State<App>) -> Json<Value> {
    let v: Value = serde_json::from_str(&app.inner.ontology.to_json()).expect("ontology json");
    Json(v)
}

async fn next_eval_study(
    State(app): State<App>,
    Path(set_id): Path<String>,
    Query(q): Query<RaterQuery>,
    headers: HeaderMap,
) -> ApiResult<Json<Value>> {
    let inner = &app.inner;
    let set = inner
        .sets
        .get(&set_id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown evaluation set {set_id:?}")))?;
    let rater = require_rater(rater_of(None, &q, &headers))?;
    let names = inner.finding_names(set);
    let state = inner.state.read().expect("state lock");
    let queue = state.eval_queue(set, &rater, inner.seed, &names);
    let rated = queue.iter().filter(|(_, done)| *done).count();
    let Some(&(idx, _)) = queue.iter().find(|(_, done)| !done) else {
        return Ok(Json(json!({ "done": true, "set_id": set.set_id, "total": queue.len() })));
    };
    let study = &set.studies[idx];
    let pending: Vec<&String> = names
        .iter()
        .filter(|f| state.rating(&set.set_id, &study.study_id, f, &rater).is_none())
        .collect();
    Ok(Json(json!({
        "done": false,
        "set_id": set.set_id,
        "study_id": study.study_id,
        "pa_image": study.pa_image,
        "lateral_image": study.lateral_image,
        "findings": names,
        "pending_findings": pending,
        "rated": rated,
        "total": queue.len(),
    })))
}

#[derive(Debug, Deserialize)]
struct RatingBody {
    #[serde(default)]
    set_id: Option<String>,
    study_id: String,
    finding: String,
    label: RatingLabel,
    #[serde(default)]
    rater_id: Option<String>,
}

async fn submit_rating(
    State(app): State<App>,
    Path(set_id): Path<String>,
    Query(q): Query<RaterQuery>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let inner = &app.inner;
    let set = inner
        .sets
        .get(&set_id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown evaluation set {set_id:?}")))?;
    let body: RatingBody = parse_body(&body)?;
    if body.set_id.as_ref().is_some_and(|s| s != &set_id) {
        return Err(ApiError::Unprocessable(format!(
            "body names set {:?} but the path names {set_id:?}",
            body.set_id.unwrap_or_default()
        )));
    }
    let rater = require_rater(rater_of(body.rater_id.as_deref(), &q, &headers))?;
    if set.study(&body.study_id).is_none() {
        return Err(ApiError::Unprocessable(format!(
            "study {:?} is not in set {set_id:?}",
            body.study_id
        )));
    }
    let finding: FindingId = inner
        .ontology
        .canonical_finding(&body.finding)
        .map_err(|e| ApiError::Unprocessable(e.to_string()))?;
    if !set.findings.contains(&finding) {
        return Err(ApiError::Unprocessable(format!(
            "finding {:?} is not rated in set {set_id:?}",
            body.finding
        )));
    }
    let rating = StudyRating {
        set_id: set_id.clone(),
        study_id: body.study_id,
        finding: inner.ontology.name(finding).to_string(),
        rater_id: rater.clone(),
        label: body.label,
    };
    let event_id = app.commit(rater, EventPayload::StudyRating(rating)).await?;
    Ok(Json(json!({ "event_id": event_id })))
}

async fn progress(State(app): State<App>) -> Json<Value> {
    Json(serde_json::to_value(app.progress()).expect("progress json"))
}

fn jsonl<T: serde::Serialize>(rows: impl Iterator<Item = T>) -> Response {
    let mut body = String::new();
    for row in rows {
        body.push_str(&serde_json::to_string(&row).expect("row json"));
        body.push('\n');
    }
    ([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response()
}

async fn export_ratings(State(app): State<App>) -> Response {
    let inner = &app.inner;
    let state = inner.state.read().expect("state lock");
    let records = state.rating_records(
        &inner.sets,
        |s| inner.finding_names(s),
        |set, si, fi| set.opinion(&set.studies[si], set.findings[fi], &inner.ontology),
    );
    jsonl(records.into_iter())
}

async fn export_tags(State(app): State<App>) -> Response {
    let state = app.inner.state.read().expect("state lock");
    jsonl(state.tags())
}
