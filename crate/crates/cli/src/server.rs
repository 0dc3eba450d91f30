//! JSON API behind the annotation interface.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;
use tracing::info;

use qstance_core::annotate::{AnnotateError, AnnotationStore, UnitDraft};
use qstance_core::config::PipelineConfig;
use qstance_core::io::read_jsonl;
use qstance_core::pipeline::Layout;
use qstance_core::stance::Prediction;
use qstance_core::triangulate::SampleManifest;
use qstance_core::Error;

pub type SharedStore = Arc<Mutex<AnnotationStore>>;

/// Directory under the output root where annotation state lives.
pub const ANNOTATION_DIR: &str = "annotation";

/// Opens the store from the sample manifest and ingested articles in the
/// output directory. Predictions, when present, become prelabels.
pub fn open_store(cfg: &PipelineConfig) -> qstance_core::Result<AnnotationStore> {
    let layout = Layout::new(&cfg.out_dir);
    let raw = std::fs::read_to_string(layout.sample_manifest()).map_err(|e| Error::io(layout.sample_manifest(), e))?;
    let manifest: SampleManifest = serde_json::from_str(&raw)?;
    let texts: BTreeMap<String, String> = read_jsonl::<qstance_core::corpus::ArticleRecord>(&layout.articles())?
        .into_iter()
        .map(|a| (a.article_id, a.text))
        .collect();
    let predictions: Vec<Prediction> = if layout.predictions().exists() {
        read_jsonl(&layout.predictions())?
    } else {
        Vec::new()
    };
    Ok(AnnotationStore::open(
        &layout.file(ANNOTATION_DIR),
        &manifest,
        [cfg.annotator_a.clone(), cfg.annotator_b.clone()],
        texts,
        predictions,
    )?
    .with_align_mode(cfg.align_mode))
}

pub fn router(store: SharedStore, ui_dir: Option<&std::path::Path>) -> Router {
    let api = Router::new()
        .route("/api/tasks/next", get(next_task))
        .route("/api/tasks/{id}/units", get(get_units).post(save_units))
        .route("/api/articles/{id}", get(article))
        .route("/api/agreement", get(agreement))
        .route("/api/progress", get(progress))
        .with_state(store);
    match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

pub fn serve(cfg: &PipelineConfig, addr: &str) -> anyhow::Result<()> {
    let store = Arc::new(Mutex::new(open_store(cfg)?));
    let app = router(store, cfg.ui_dir.as_deref());
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(addr).await?;
        info!(%addr, "annotation server listening");
        axum::serve(listener, app).await?;
        Ok(())
    })
}

pub struct ApiError(AnnotateError);

impl From<AnnotateError> for ApiError {
    fn from(e: AnnotateError) -> Self {
        ApiError(e)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError(AnnotateError::Storage(e))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, kind) = match &self.0 {
            AnnotateError::UnknownTask(_) | AnnotateError::UnknownArticle(_) | AnnotateError::UnknownAnnotator(_) => {
                (StatusCode::NOT_FOUND, "not-found")
            }
            AnnotateError::NotAssigned { .. } | AnnotateError::Blinded => (StatusCode::FORBIDDEN, "forbidden"),
            AnnotateError::Conflict { .. } => (StatusCode::CONFLICT, "conflict"),
            AnnotateError::WrongStatus(_) => (StatusCode::CONFLICT, "wrong-status"),
            AnnotateError::Invalid(_) => (StatusCode::UNPROCESSABLE_ENTITY, "invalid"),
            AnnotateError::Storage(_) => (StatusCode::INTERNAL_SERVER_ERROR, "storage"),
        };
        let mut body = json!({ "error": kind, "message": self.0.to_string() });
        match &self.0 {
            AnnotateError::Invalid(fields) => body["fields"] = json!(fields),
            AnnotateError::Conflict { current, .. } => body["current_version"] = json!(current),
            _ => {}
        }
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Deserialize)]
struct Who {
    annotator: String,
}

fn lock(store: &SharedStore) -> std::sync::MutexGuard<'_, AnnotationStore> {
    store.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

async fn next_task(State(store): State<SharedStore>, Query(q): Query<Who>) -> ApiResult<impl serde::Serialize> {
    Ok(Json(lock(&store).next_task(&q.annotator)?))
}

async fn article(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
    Query(q): Query<Who>,
) -> ApiResult<impl serde::Serialize> {
    Ok(Json(lock(&store).article(&id, &q.annotator)?))
}

async fn get_units(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
    Query(q): Query<Who>,
) -> ApiResult<impl serde::Serialize> {
    Ok(Json(lock(&store).units(&id, &q.annotator)?))
}

#[derive(Deserialize)]
struct SaveRequest {
    annotator: String,
    base_version: u64,
    units: Vec<UnitDraft>,
    #[serde(default)]
    complete: bool,
}

async fn save_units(
    State(store): State<SharedStore>,
    Path(id): Path<String>,
    Json(req): Json<SaveRequest>,
) -> ApiResult<serde_json::Value> {
    let version = lock(&store).save_units(&id, &req.annotator, req.units, req.base_version, req.complete)?;
    Ok(Json(json!({ "version": version })))
}

async fn agreement(State(store): State<SharedStore>) -> ApiResult<impl serde::Serialize> {
    Ok(Json(lock(&store).live_agreement()?))
}

async fn progress(State(store): State<SharedStore>) -> ApiResult<impl serde::Serialize> {
    Ok(Json(lock(&store).progress()))
}
