//! `POST /render` and `GET /healthz`.

use std::ffi::OsStr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use pluot_core::{EngineError, ErrorKind, OutputKind, PlotSpec, Session, StorePolicy};
use serde::{Deserialize, Serialize};

/// Shared, read-only service configuration. Each request renders in its
/// own session, so nothing mutable is shared between requests.
#[derive(Debug, Clone)]
pub struct AppState {
    policy: Arc<StorePolicy>,
}

impl AppState {
    pub fn new(policy: StorePolicy) -> Self {
        Self {
            policy: Arc::new(policy),
        }
    }

    /// Confines stores to the roots listed in a `PLUOT_STORE_ROOT`-style
    /// path list. An empty or missing list allows no filesystem stores.
    pub fn from_root_list(list: Option<&OsStr>) -> Self {
        let roots: Vec<PathBuf> = list
            .map(|l| std::env::split_paths(l).filter(|p| !p.as_os_str().is_empty()).collect())
            .unwrap_or_default();
        Self::new(StorePolicy::confined(roots))
    }

    pub fn policy(&self) -> &StorePolicy {
        &self.policy
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/render", post(render))
        .route("/healthz", get(|| async { "ok" }))
        .with_state(state)
}

#[derive(Debug, Deserialize)]
pub struct RenderQuery {
    format: Option<String>,
}

/// RFC 9457 problem report.
#[derive(Debug, Serialize)]
pub struct Problem {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub title: &'static str,
    pub status: u16,
    pub detail: String,
}

pub fn problem(status: StatusCode, detail: impl Into<String>) -> Response {
    let body = Problem {
        kind: "about:blank",
        title: status.canonical_reason().unwrap_or("error"),
        status: status.as_u16(),
        detail: detail.into(),
    };
    (
        status,
        [(header::CONTENT_TYPE, "application/problem+json")],
        serde_json::to_string(&body).expect("problem serializes"),
    )
        .into_response()
}

pub fn status_for(err: &EngineError) -> StatusCode {
    match err.kind() {
        ErrorKind::InvalidSpec => StatusCode::BAD_REQUEST,
        ErrorKind::NotFound => StatusCode::NOT_FOUND,
        ErrorKind::Data | ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

async fn render(State(state): State<AppState>, Query(q): Query<RenderQuery>, body: Bytes) -> Response {
    let kind = match q.format.as_deref() {
        None | Some("png") => OutputKind::Bitmap,
        Some("svg") => OutputKind::Vector,
        Some(other) => {
            return problem(
                StatusCode::BAD_REQUEST,
                format!("unknown format {other:?}, expected png or svg"),
            );
        }
    };
    let Ok(text) = std::str::from_utf8(&body) else {
        return problem(StatusCode::BAD_REQUEST, "request body is not UTF-8");
    };
    let spec = match PlotSpec::from_json(text) {
        Ok(s) => s,
        Err(e) => return problem(StatusCode::BAD_REQUEST, format!("invalid spec: {e}")),
    };
    let policy = state.policy.as_ref().clone();
    let result = tokio::task::spawn_blocking(move || {
        let base = policy
            .allowed_roots
            .as_ref()
            .and_then(|r| r.first().cloned())
            .unwrap_or_default();
        let mut session = Session::new().with_policy(policy).with_base_dir(base);
        match kind {
            OutputKind::Bitmap => session.render_png(&spec),
            OutputKind::Vector => session.render_svg(&spec).map(String::into_bytes),
        }
    })
    .await;
    match result {
        Ok(Ok(bytes)) => {
            let ctype = match kind {
                OutputKind::Bitmap => "image/png",
                OutputKind::Vector => "image/svg+xml",
            };
            tracing::info!(format = ctype, bytes = bytes.len(), "rendered");
            ([(header::CONTENT_TYPE, ctype)], bytes).into_response()
        }
        Ok(Err(e)) => {
            let status = status_for(&e);
            tracing::warn!(%status, error = %e, "render failed");
            problem(status, e.to_string())
        }
        Err(join) => {
            tracing::error!(error = %join, "render task panicked");
            problem(StatusCode::INTERNAL_SERVER_ERROR, "render task failed")
        }
    }
}
