//! Local HTTP service backing the interactive tuning UI.
//!
//! | method | path                   | result                                   |
//! |--------|------------------------|------------------------------------------|
//! | POST   | `/session`             | multipart upload; JSON with the new id   |
//! | GET    | `/session/{id}/result` | PNG for `?h=&epsilon=[&norm=]`           |
//! | GET    | `/session/{id}/meta`   | JSON dims, defaults and the `h` hint     |
//! | DELETE | `/session/{id}`        | frees the session                        |
//!
//! A session holds the decoded image and its gradient fields, both immutable
//! after upload, so concurrent requests share them without locking. Only the
//! per-session result cache sits behind a mutex, and it is never held during
//! a solve. Sessions live in memory and do not survive a restart.

use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use dereflect_core::codec::{decode_image_detailed, probe_dimensions};
use dereflect_core::pipeline::{DEFAULT_EPSILON, DEFAULT_H, H_RANGE_HINT};
use dereflect_core::{encode_png, Error as CoreError, NormMode, PreparedImage, SuppressionParams};
use lru::LruCache;
use serde::Serialize;
use tower_http::services::ServeDir;
use uuid::Uuid;

use crate::config::ServeArgs;

/// Header carrying the solve time of a result, in milliseconds. Codec work is
/// excluded; cached responses report the time of the original solve.
pub const SOLVE_TIME_HEADER: &str = "x-solve-time-ms";
/// `hit` when a result came from the session cache, `miss` otherwise.
pub const CACHE_HEADER: &str = "x-cache";

const INDEX_HTML: &str = include_str!("index.html");

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub max_pixels: u64,
    pub cache_size: NonZeroUsize,
    pub assets: Option<PathBuf>,
}

impl ServerConfig {
    pub fn from_args(args: &ServeArgs) -> Self {
        Self {
            max_pixels: args.max_pixels,
            cache_size: NonZeroUsize::new(args.cache_size as usize).unwrap_or(NonZeroUsize::MIN),
            assets: args.assets.clone(),
        }
    }

    /// Request body cap. Generous enough for an uncompressed RGBA image at
    /// the pixel limit; the pixel count itself is checked from the header.
    fn body_limit(&self) -> usize {
        let bytes = self.max_pixels.saturating_mul(8).saturating_add(1 << 20);
        usize::try_from(bytes).unwrap_or(usize::MAX).max(16 << 20)
    }
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            max_pixels: crate::config::DEFAULT_MAX_PIXELS,
            cache_size: NonZeroUsize::new(32).unwrap(),
            assets: None,
        }
    }
}

type CacheKey = (u64, u64, bool);

#[derive(Clone)]
struct Rendered {
    png: Bytes,
    solve_ms: f64,
}

struct Session {
    prepared: PreparedImage,
    results: Mutex<LruCache<CacheKey, Rendered>>,
}

struct AppState {
    config: ServerConfig,
    sessions: RwLock<HashMap<Uuid, Arc<Session>>>,
}

impl AppState {
    fn new(config: ServerConfig) -> Self {
        Self {
            config,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        let key = parse_id(id)?;
        self.sessions
            .read()
            .unwrap()
            .get(&key)
            .cloned()
            .ok_or_else(|| unknown_session(id))
    }

    fn remove(&self, id: &str) -> Result<(), ApiError> {
        let key = parse_id(id)?;
        self.sessions
            .write()
            .unwrap()
            .remove(&key)
            .map(drop)
            .ok_or_else(|| unknown_session(id))
    }
}

fn unknown_session(id: &str) -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, format!("unknown session {id}"))
}

/// Ids that are not UUIDs cannot name a session, so they are reported as
/// unknown rather than malformed.
fn parse_id(id: &str) -> Result<Uuid, ApiError> {
    Uuid::parse_str(id).map_err(|_| unknown_session(id))
}

pub fn router(config: ServerConfig) -> Router {
    let limit = config.body_limit();
    let assets = config.assets.clone();
    let state = Arc::new(AppState::new(config));
    let api = Router::new()
        .route("/session", post(create_session))
        .route("/session/{id}", delete(delete_session))
        .route("/session/{id}/meta", get(session_meta))
        .route("/session/{id}/result", get(session_result))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state);
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(INDEX_HTML) })),
    }
}

pub async fn serve(args: &ServeArgs) -> anyhow::Result<()> {
    let app = router(ServerConfig::from_args(args));
    let listener = tokio::net::TcpListener::bind((args.bind.as_str(), args.port)).await?;
    log::info!("listening on http://{}", listener.local_addr()?);
    println!("serving on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, message)
    }

    fn internal(message: impl std::fmt::Display) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, message.to_string())
    }
}

impl From<CoreError> for ApiError {
    fn from(e: CoreError) -> Self {
        let status = match e {
            CoreError::UnsupportedFormat(_) => StatusCode::UNSUPPORTED_MEDIA_TYPE,
            CoreError::Decode(_) | CoreError::InvalidParameter(_) | CoreError::TooSmall { .. } => {
                StatusCode::BAD_REQUEST
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(serde_json::json!({ "error": self.message }))).into_response()
    }
}

#[derive(Debug, Serialize)]
pub struct SessionCreated {
    pub id: String,
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub alpha_dropped: bool,
}

#[derive(Debug, Serialize)]
pub struct SessionMeta {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub default_h: f64,
    pub default_epsilon: f64,
    pub h_range: [f64; 2],
}

async fn create_session(
    State(state): State<Arc<AppState>>,
    mut multipart: Multipart,
) -> Result<(StatusCode, Json<SessionCreated>), ApiError> {
    let mut upload = None;
    while let Some(field) = multipart
        .next_field()
        .await
        .map_err(|e| ApiError::new(e.status(), e.body_text()))?
    {
        let is_image = field.name() == Some("image") || field.file_name().is_some();
        let bytes = field
            .bytes()
            .await
            .map_err(|e| ApiError::new(e.status(), e.body_text()))?;
        if is_image {
            upload = Some(bytes);
            break;
        }
    }
    let bytes = upload.ok_or_else(|| ApiError::bad_request("multipart body has no image field"))?;

    let (h, w) = probe_dimensions(&bytes)?;
    let pixels = (h as u64).saturating_mul(w as u64);
    if pixels > state.config.max_pixels {
        return Err(ApiError::new(
            StatusCode::PAYLOAD_TOO_LARGE,
            format!(
                "{w}x{h} image has {pixels} pixels; limit is {}",
                state.config.max_pixels
            ),
        ));
    }

    let (prepared, alpha_dropped) = tokio::task::spawn_blocking(move || {
        decode_image_detailed(&bytes).map(|d| (PreparedImage::new(d.image), d.alpha_dropped))
    })
    .await
    .map_err(ApiError::internal)??;

    let image = prepared.image();
    let id = Uuid::new_v4();
    let created = SessionCreated {
        id: id.to_string(),
        width: image.width(),
        height: image.height(),
        channels: image.num_channels(),
        alpha_dropped,
    };
    let session = Session {
        prepared,
        results: Mutex::new(LruCache::new(state.config.cache_size)),
    };
    state.sessions.write().unwrap().insert(id, Arc::new(session));
    log::info!(
        "session {} created ({}x{}x{})",
        created.id,
        created.height,
        created.width,
        created.channels
    );
    Ok((StatusCode::CREATED, Json(created)))
}

async fn delete_session(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    state.remove(&id)?;
    log::info!("session {id} deleted");
    Ok(StatusCode::NO_CONTENT)
}

async fn session_meta(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
) -> Result<Json<SessionMeta>, ApiError> {
    let session = state.session(&id)?;
    let image = session.prepared.image();
    Ok(Json(SessionMeta {
        width: image.width(),
        height: image.height(),
        channels: image.num_channels(),
        default_h: DEFAULT_H,
        default_epsilon: DEFAULT_EPSILON,
        h_range: [H_RANGE_HINT.0, H_RANGE_HINT.1],
    }))
}

fn parse_param(query: &HashMap<String, String>, name: &str, default: f64) -> Result<f64, ApiError> {
    match query.get(name) {
        None => Ok(default),
        Some(raw) => raw
            .trim()
            .parse::<f64>()
            .map_err(|_| ApiError::bad_request(format!("{name}: expected a number, got {raw:?}"))),
    }
}

fn parse_params(query: &HashMap<String, String>) -> Result<SuppressionParams, ApiError> {
    let h = parse_param(query, "h", DEFAULT_H)?;
    let epsilon = parse_param(query, "epsilon", DEFAULT_EPSILON)?;
    let norm = match query.get("norm") {
        None => NormMode::default(),
        Some(raw) => raw
            .parse()
            .map_err(|e: CoreError| ApiError::bad_request(e.to_string()))?,
    };
    SuppressionParams::with_norm_mode(h, epsilon, norm).map_err(|e| ApiError::bad_request(e.to_string()))
}

async fn session_result(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let session = state.session(&id)?;
    let params = parse_params(&query)?;
    let key = (
        params.h().to_bits(),
        params.epsilon().to_bits(),
        params.norm_mode() == NormMode::JointChannel,
    );

    let cached = session.results.lock().unwrap().get(&key).cloned();
    let (rendered, hit) = match cached {
        Some(r) => (r, true),
        None => {
            let worker = Arc::clone(&session);
            let rendered = tokio::task::spawn_blocking(move || {
                let start = Instant::now();
                let out = worker.prepared.suppress(&params);
                let solve_ms = start.elapsed().as_secs_f64() * 1e3;
                encode_png(&out).map(|png| Rendered {
                    png: Bytes::from(png),
                    solve_ms,
                })
            })
            .await
            .map_err(ApiError::internal)??;
            session.results.lock().unwrap().put(key, rendered.clone());
            (rendered, false)
        }
    };

    let mut response = rendered.png.into_response();
    let headers = response.headers_mut();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static("image/png"));
    headers.insert(header::CACHE_CONTROL, HeaderValue::from_static("no-store"));
    headers.insert(
        SOLVE_TIME_HEADER,
        HeaderValue::from_str(&format!("{:.3}", rendered.solve_ms)).expect("ascii number"),
    );
    headers.insert(CACHE_HEADER, HeaderValue::from_static(if hit { "hit" } else { "miss" }));
    Ok(response)
}
