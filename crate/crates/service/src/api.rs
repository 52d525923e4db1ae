use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use linlayout::{verify, JobError, JobRequest, SpecError};
use serde_json::json;

use crate::record::{JobRecord, JobStatus};
use crate::{now_ms, timestamp, Inner, ServiceError};

const MAX_PAGE: usize = 1000;
const DEFAULT_PAGE: usize = 100;

type Shared = State<Arc<Inner>>;

pub(crate) fn router(inner: Arc<Inner>) -> Router {
    let limit = inner.cfg.max_body_bytes;
    Router::new()
        .route("/jobs", get(list_jobs).post(submit))
        .route("/jobs/{id}", get(get_job).delete(cancel))
        .route("/health", get(health))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(inner)
}

struct ApiError {
    status: StatusCode,
    body: serde_json::Value,
}

impl ApiError {
    fn new(status: StatusCode, msg: impl std::fmt::Display) -> Self {
        Self { status, body: json!({ "error": msg.to_string() }) }
    }

    fn at(status: StatusCode, msg: impl std::fmt::Display, path: String) -> Self {
        Self { status, body: json!({ "error": msg.to_string(), "path": path }) }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e)
    }
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))?
        .map_err(ApiError::from)
}

fn job_error(e: JobError) -> ApiError {
    let path = match &e {
        JobError::GraphSource => "graph",
        JobError::UnknownGenerator(_) => "generator.name",
        JobError::BadParam(p) => return ApiError::at(StatusCode::BAD_REQUEST, &e, format!("generator.params.{p}")),
        JobError::BadTimeout => "solver.timeout_s",
        JobError::Construction(_) => "generator.params",
        JobError::Spec(SpecError::NoPages) => "pages",
        JobError::Spec(SpecError::Constraint { index, .. }) => {
            return ApiError::at(StatusCode::BAD_REQUEST, &e, format!("constraints[{index}]"))
        }
    };
    ApiError::at(StatusCode::BAD_REQUEST, &e, path.to_string())
}

async fn submit(State(inner): Shared, body: Bytes) -> Result<Response, ApiError> {
    let de = &mut serde_json::Deserializer::from_slice(&body);
    let req: JobRequest = serde_path_to_error::deserialize(de)
        .map_err(|e| ApiError::at(StatusCode::BAD_REQUEST, e.inner(), e.path().to_string()))?;
    let timeout = req.timeout().map_err(job_error)?;
    // Generators may build large graphs; keep that off the reactor.
    let (graph, spec) = tokio::task::spawn_blocking(move || req.resolve())
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))?
        .map_err(job_error)?;
    let cap = inner.cfg.timeout_cap;
    let rec = JobRecord {
        id: uuid::Uuid::now_v7().to_string(),
        submitted_at: timestamp(),
        status: JobStatus::Queued,
        graph,
        spec,
        timeout_s: timeout.map_or(cap, |t| t.min(cap)).as_secs_f64(),
        result: None,
        stats: None,
        error: None,
    };
    let id = rec.id.clone();
    let store = inner.clone();
    blocking(move || store.store.insert(&rec)).await?;
    inner.enqueue(id.clone());
    Ok((StatusCode::CREATED, [(header::LOCATION, format!("/jobs/{id}"))], Json(json!({ "id": id }))).into_response())
}

async fn get_job(State(inner): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let check = inner.cfg.verify_on_read;
    let store = inner.clone();
    let key = id.clone();
    let body = blocking(move || store.store.get_raw(&key))
        .await?
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no job `{id}`")))?;
    if check {
        let rec: JobRecord = serde_json::from_slice(&body).map_err(ServiceError::from)?;
        if let Some(layout) = &rec.result {
            let problems = match verify(&rec.graph, &rec.spec, layout) {
                Ok(v) if v.is_empty() => None,
                Ok(v) => Some(format!("{} violation(s), first: {}", v.len(), v[0])),
                Err(e) => Some(e.to_string()),
            };
            if let Some(p) = problems {
                return Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, format!("stored layout fails verification: {p}")));
            }
        }
    }
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

async fn list_jobs(State(inner): Shared, Query(q): Query<HashMap<String, String>>) -> Result<Response, ApiError> {
    let bad = |m: String| ApiError::new(StatusCode::BAD_REQUEST, m);
    let status = q
        .get("status")
        .map(|s| s.parse::<JobStatus>())
        .transpose()
        .map_err(bad)?;
    let cursor = q
        .get("cursor")
        .map(|c| uuid::Uuid::parse_str(c).map(|u| u.to_string()).map_err(|_| bad(format!("bad cursor `{c}`"))))
        .transpose()?;
    let limit = match q.get("limit") {
        None => DEFAULT_PAGE,
        Some(l) => l
            .parse::<usize>()
            .ok()
            .filter(|n| (1..=MAX_PAGE).contains(n))
            .ok_or_else(|| bad(format!("limit must be between 1 and {MAX_PAGE}")))?,
    };
    let store = inner.clone();
    let jobs = blocking(move || store.store.list(status, cursor.as_deref(), limit)).await?;
    let next = (jobs.len() == limit).then(|| jobs.last().map(|j| j.id.clone())).flatten();
    Ok(Json(json!({ "jobs": jobs, "next_cursor": next })).into_response())
}

async fn cancel(State(inner): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    let worker = inner.clone();
    let outcome = blocking(move || {
        let Some(mut rec) = worker.store.get(&id)? else { return Ok(None) };
        match rec.status {
            JobStatus::Queued => {
                rec.status = JobStatus::Cancelled;
                if worker.store.update_if(&rec, &[JobStatus::Queued], Some(now_ms()))? {
                    return Ok(Some((StatusCode::OK, rec.id, JobStatus::Cancelled)));
                }
                // A worker claimed it in between; fall through to interrupt.
                let token = worker.running.lock().unwrap().get(&id).cloned();
                token.inspect(|t| t.cancel());
                Ok(Some((StatusCode::ACCEPTED, rec.id, JobStatus::Running)))
            }
            JobStatus::Running => {
                if let Some(t) = worker.running.lock().unwrap().get(&id) {
                    t.cancel();
                }
                Ok(Some((StatusCode::ACCEPTED, rec.id, JobStatus::Running)))
            }
            done => Ok(Some((StatusCode::CONFLICT, rec.id, done))),
        }
    })
    .await?;
    match outcome {
        None => Err(ApiError::new(StatusCode::NOT_FOUND, "no such job")),
        Some((StatusCode::CONFLICT, id, st)) => Err(ApiError::new(StatusCode::CONFLICT, format!("job {id} already finished: {st}"))),
        Some((code, id, st)) => Ok((code, Json(json!({ "id": id, "status": st }))).into_response()),
    }
}

async fn health(State(inner): Shared) -> Result<Response, ApiError> {
    let store = inner.clone();
    let (queued, running) =
        blocking(move || Ok((store.store.count(JobStatus::Queued)?, store.store.count(JobStatus::Running)?))).await?;
    Ok(Json(json!({
        "status": "ok",
        "workers": inner.cfg.workers.max(1),
        "queued": queued,
        "running": running,
        "timeout_cap_s": inner.cfg.timeout_cap.as_secs_f64(),
    }))
    .into_response())
}

