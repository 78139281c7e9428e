//! HTTP routes.
//!
//! | method | path                          | success |
//! |--------|-------------------------------|---------|
//! | POST   | /datasets                     | 201     |
//! | GET    | /datasets/{id}                | 200     |
//! | GET    | /datasets/{id}/capabilities   | 200     |
//! | DELETE | /datasets/{id}                | 204     |
//! | POST   | /jobs                         | 202     |
//! | GET    | /jobs/{id}                    | 200     |
//! | GET    | /jobs/{id}/events             | 200     |
//! | GET    | /jobs/{id}/result             | 200     |
//! | GET    | /jobs/{id}/result.csv         | 200     |
//! | GET    | /jobs/{id}/files/{name}       | 200     |

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, Multipart, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use biblio_core::{AnalysisKind, IngestError};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;

use crate::jobs::{AnalysisJob, JobState};
use crate::service::{Service, ServiceError};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl ToString) -> Self {
        Self {
            status,
            body: json!({ "error": message.to_string() }),
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        match &e {
            ServiceError::UnknownDataset(_) => Self::new(StatusCode::NOT_FOUND, &e),
            ServiceError::NotEligible { missing_fields, .. } => {
                Self::new(StatusCode::CONFLICT, &e).with("missing_fields", json!(missing_fields))
            }
            ServiceError::InvalidParams(_) => Self::new(StatusCode::BAD_REQUEST, &e),
            ServiceError::Ingest(IngestError::UndecodableFile) => Self::new(StatusCode::UNSUPPORTED_MEDIA_TYPE, &e),
            ServiceError::Ingest(ingest) => {
                let mut err = Self::new(StatusCode::UNPROCESSABLE_ENTITY, &e).with("kind", json!(ingest_kind(ingest)));
                if let IngestError::MalformedRow { row, line, expected, found } = ingest {
                    err = err.with(
                        "diagnostics",
                        json!([{ "row": row, "line": line, "expected": expected, "found": found }]),
                    );
                }
                err
            }
            ServiceError::Store(_) | ServiceError::Config(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, &e),
        }
    }
}

fn ingest_kind(e: &IngestError) -> &'static str {
    match e {
        IngestError::UndecodableFile => "UndecodableFile",
        IngestError::EmptyFile => "EmptyFile",
        IngestError::MalformedRow { .. } => "MalformedRow",
        IngestError::MissingHeader => "MissingHeader",
        IngestError::Mapping(_) => "Mapping",
        IngestError::Csv(_) => "Csv",
    }
}

type AppState = Arc<Service>;

pub fn router(service: Arc<Service>, upload_limit: usize) -> Router {
    Router::new()
        .route(
            "/datasets",
            post(upload).layer(DefaultBodyLimit::max(upload_limit)),
        )
        .route("/datasets/{id}", get(get_dataset).delete(delete_dataset))
        .route("/datasets/{id}/capabilities", get(get_capabilities))
        .route("/jobs", post(submit_job))
        .route("/jobs/{id}", get(get_job))
        .route("/jobs/{id}/events", get(get_events))
        .route("/jobs/{id}/result", get(get_result))
        .route("/jobs/{id}/result.csv", get(get_result_csv))
        .route("/jobs/{id}/files/{name}", get(get_file))
        .layer(CorsLayer::permissive())
        .with_state(service)
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))
}

async fn upload(State(svc): State<AppState>, mut multipart: Multipart) -> Result<Response, ApiError> {
    let multipart_err = |e: axum::extract::multipart::MultipartError| ApiError::new(e.status(), e.body_text());
    let mut file: Option<(String, Bytes)> = None;
    while let Some(field) = multipart.next_field().await.map_err(multipart_err)? {
        if field.name() == Some("file") {
            let name = field.file_name().unwrap_or("upload").to_string();
            file = Some((name, field.bytes().await.map_err(multipart_err)?));
        }
    }
    let Some((filename, raw)) = file else {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "multipart field `file` is required"));
    };
    let meta = blocking(move || svc.upload(&filename, &raw)).await??;
    let body = json!({
        "dataset_id": meta.id,
        "filename": meta.filename,
        "source": meta.source,
        "row_count": meta.row_count,
        "warnings": meta.warnings,
        "capabilities": meta.capabilities,
    });
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

async fn get_dataset(State(svc): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(svc.dataset_meta(&id)?).into_response())
}

async fn get_capabilities(State(svc): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(svc.dataset_meta(&id)?.capabilities).into_response())
}

async fn delete_dataset(State(svc): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    svc.delete_dataset(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobRequest {
    dataset_id: String,
    analysis: String,
    #[serde(default)]
    params: Value,
}

async fn submit_job(
    State(svc): State<AppState>,
    body: Result<Json<JobRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let Json(req) = body.map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.body_text()))?;
    let analysis: AnalysisKind = req
        .analysis
        .parse()
        .map_err(|e: String| ApiError::new(StatusCode::BAD_REQUEST, e))?;
    let job = svc.submit(&req.dataset_id, analysis, req.params)?;
    let body = json!({ "job_id": job.id, "state": job.state });
    Ok((StatusCode::ACCEPTED, Json(body)).into_response())
}

fn find_job(svc: &Service, id: &str) -> Result<AnalysisJob, ApiError> {
    svc.job(id)?
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("job `{id}` not found")))
}

async fn get_job(State(svc): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(find_job(&svc, &id)?).into_response())
}

async fn get_events(State(svc): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    find_job(&svc, &id)?;
    let events = svc.store().events(&id).map_err(ServiceError::from)?;
    Ok(Json(events).into_response())
}

fn not_ready(job: &AnalysisJob) -> ApiError {
    let message = match job.state {
        JobState::Failed => format!("job failed: {}", job.error.as_deref().unwrap_or("unknown error")),
        state => format!("job is {}", serde_json::to_value(state).expect("state serializes").as_str().unwrap_or("")),
    };
    ApiError::new(StatusCode::CONFLICT, message).with("state", json!(job.state))
}

fn file_response(svc: &Service, job: &AnalysisJob, name: &str) -> Result<Response, ApiError> {
    if job.state != JobState::Done {
        return Err(not_ready(job));
    }
    let bytes = svc
        .result_file(job, name)?
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no result file `{name}`")))?;
    let content_type = if name.ends_with(".json") {
        "application/json"
    } else if name.ends_with(".csv") {
        "text/csv; charset=utf-8"
    } else if name.ends_with(".graphml") {
        "application/xml"
    } else {
        "application/octet-stream"
    };
    Ok(([(header::CONTENT_TYPE, content_type)], bytes).into_response())
}

async fn get_result(State(svc): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let job = find_job(&svc, &id)?;
    file_response(&svc, &job, "result.json")
}

async fn get_result_csv(State(svc): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let job = find_job(&svc, &id)?;
    file_response(&svc, &job, job.analysis.primary_csv())
}

async fn get_file(State(svc): State<AppState>, Path((id, name)): Path<(String, String)>) -> Result<Response, ApiError> {
    let job = find_job(&svc, &id)?;
    file_response(&svc, &job, &name)
}
