//! HTTP routes over the gateway and sync service.

use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::gateway::{Gateway, GatewayRequest};
use crate::sync::{IngestError, SyncService};
use crate::whitelist::Whitelist;

pub const DEVICE_PHONE_HEADER: &str = "x-device-phone";

#[derive(Clone)]
pub struct AppState {
    pub gateway: Arc<Gateway>,
    pub sync: Arc<SyncService>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionResponse {
    pub version: String,
    pub count: usize,
}

#[derive(Debug, Deserialize)]
struct AuthRequest {
    phone: String,
}

pub fn router(state: AppState, ui_dir: Option<PathBuf>) -> Router {
    let app = Router::new()
        .route("/ussd", post(ussd))
        .route("/directory/version", get(version))
        .route("/directory/snapshot", get(snapshot))
        .route("/auth", post(auth))
        .route("/logs", post(logs))
        .route("/admin/whitelist", post(admin_whitelist))
        .route("/admin/reload", post(admin_reload))
        .with_state(state);
    match ui_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

fn text(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "text/plain; charset=utf-8")], body).into_response()
}

fn is_json(headers: &HeaderMap) -> bool {
    headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.trim_start().starts_with("application/json"))
}

async fn ussd(State(app): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    let parsed: Result<GatewayRequest, String> = if is_json(&headers) {
        serde_json::from_slice(&body).map_err(|e| e.to_string())
    } else {
        serde_urlencoded::from_bytes(&body).map_err(|e| e.to_string())
    };
    let req = match parsed {
        Ok(req) => req,
        Err(e) => return text(StatusCode::BAD_REQUEST, format!("malformed request: {e}")),
    };
    match app.gateway.handle(&req) {
        Ok(screen) => text(StatusCode::OK, screen.wire()),
        Err(e) => text(StatusCode::BAD_REQUEST, format!("malformed request: {e}")),
    }
}

async fn version(State(app): State<AppState>) -> Json<VersionResponse> {
    let loaded = app.gateway.current();
    Json(VersionResponse { version: loaded.version().to_string(), count: loaded.directory().len() })
}

async fn snapshot(State(app): State<AppState>) -> Response {
    let loaded = app.gateway.current();
    let etag = format!("\"{}\"", loaded.version());
    (
        [(header::CONTENT_TYPE, "application/octet-stream".to_string()), (header::ETAG, etag)],
        loaded.snapshot.as_ref().clone(),
    )
        .into_response()
}

async fn auth(State(app): State<AppState>, body: Bytes) -> Response {
    match serde_json::from_slice::<AuthRequest>(&body) {
        Ok(req) => Json(app.sync.authorize(&req.phone)).into_response(),
        Err(e) => (StatusCode::BAD_REQUEST, Json(json!({ "error": e.to_string() }))).into_response(),
    }
}

async fn logs(State(app): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    let Some(phone) = headers.get(DEVICE_PHONE_HEADER).and_then(|v| v.to_str().ok()) else {
        return (StatusCode::BAD_REQUEST, Json(json!({ "error": "missing X-Device-Phone header" }))).into_response();
    };
    match app.sync.ingest(phone, &body) {
        Ok(resp) => Json(resp).into_response(),
        Err(e) => {
            let status = match e {
                IngestError::Unauthorized | IngestError::PhoneMismatch { .. } => StatusCode::FORBIDDEN,
                IngestError::Decode(_) => StatusCode::BAD_REQUEST,
                IngestError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
            };
            (status, Json(json!({ "error": e.to_string(), "record": e.record() }))).into_response()
        }
    }
}

async fn admin_whitelist(State(app): State<AppState>, body: Bytes) -> Response {
    let Ok(body) = std::str::from_utf8(&body) else {
        return (StatusCode::BAD_REQUEST, Json(json!({ "error": "whitelist is not utf-8" }))).into_response();
    };
    match Whitelist::parse(body) {
        Ok(w) => {
            let count = w.len();
            app.gateway.set_whitelist(w);
            Json(json!({ "count": count })).into_response()
        }
        Err(e) => (StatusCode::BAD_REQUEST, Json(json!({ "error": e.to_string() }))).into_response(),
    }
}

async fn admin_reload(State(app): State<AppState>, body: Bytes) -> Response {
    match app.gateway.reload_directory(&body) {
        Ok(version) => Json(json!({ "version": version })).into_response(),
        Err(e) => (StatusCode::BAD_REQUEST, Json(json!({ "error": e.to_string() }))).into_response(),
    }
}
