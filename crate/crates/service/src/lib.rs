//! HTTP JSON API over `fpr-core`.
//!
//! Every endpoint is a pure function of its request; nothing is stored
//! between requests. Responses carry `schema_version`, unknown request
//! fields are rejected, and floats are rounded to 12 significant digits.

pub mod api;
pub mod config;
mod openapi;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method as HttpMethod, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fpr_core::curves::Figure;
use fpr_core::FprError;
use serde_json::json;
use tower_http::cors::{AllowOrigin, Any, CorsLayer};
use tower_http::services::ServeDir;

use api::{CalcRequest, CurveParams, SimRequest, TtestRequest, SCHEMA_VERSION};
pub use config::ServiceConfig;

#[derive(Debug, Clone)]
struct AppState {
    max_sim_replicates: u64,
}

/// JSON error body `{schema_version, error: {code, message}}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn with_code(mut self, code: &'static str) -> Self {
        self.code = code;
        self
    }
}

impl From<FprError> for ApiError {
    fn from(e: FprError) -> Self {
        Self::new(StatusCode::BAD_REQUEST, e.code().as_str(), e.to_string())
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(e: QueryRejection) -> Self {
        Self::bad_request(e.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({
            "schema_version": SCHEMA_VERSION,
            "error": {"code": self.code, "message": self.message},
        });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult = Result<Json<serde_json::Value>, ApiError>;

async fn health() -> Json<serde_json::Value> {
    Json(json!({
        "schema_version": SCHEMA_VERSION,
        "status": "ok",
        "version": env!("CARGO_PKG_VERSION"),
    }))
}

async fn spec() -> Json<serde_json::Value> {
    Json(openapi::document())
}

async fn calc(body: Result<Json<CalcRequest>, JsonRejection>) -> ApiResult {
    let Json(req) = body?;
    Ok(Json(api::to_rounded_json(&api::calc_response(&req)?)))
}

async fn ttest(body: Result<Json<TtestRequest>, JsonRejection>) -> ApiResult {
    let Json(req) = body?;
    let resp = api::ttest_response(req.a, req.b, req.prior)?;
    Ok(Json(api::to_rounded_json(&resp)))
}

async fn curves(
    Path(figure): Path<String>,
    query: Result<Query<CurveParams>, QueryRejection>,
) -> ApiResult {
    let figure: Figure = figure
        .parse()
        .map_err(|e: FprError| ApiError::new(StatusCode::NOT_FOUND, "not_found", e.to_string()))?;
    let Query(params) = query?;
    let resp = tokio::task::spawn_blocking(move || api::curves_response(figure, &params))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(Json(api::to_rounded_json(&resp)))
}

async fn simulate(
    State(state): State<AppState>,
    body: Result<Json<SimRequest>, JsonRejection>,
) -> ApiResult {
    let Json(req) = body?;
    if req.n_sims > state.max_sim_replicates {
        return Err(ApiError::bad_request(format!(
            "n_sims {} exceeds the configured budget of {}",
            req.n_sims, state.max_sim_replicates
        ))
        .with_code("budget_exceeded"));
    }
    let resp = tokio::task::spawn_blocking(move || api::sim_response(&req))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(Json(api::to_rounded_json(&resp)))
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
}

fn cors(cfg: &ServiceConfig) -> CorsLayer {
    let origin = match cfg
        .cors_origin
        .as_deref()
        .and_then(|o| HeaderValue::from_str(o).ok())
    {
        Some(o) => AllowOrigin::exact(o),
        None => AllowOrigin::from(Any),
    };
    CorsLayer::new()
        .allow_origin(origin)
        .allow_methods([HttpMethod::GET, HttpMethod::POST])
        .allow_headers([header::CONTENT_TYPE])
}

/// Builds the application router.
pub fn router(cfg: &ServiceConfig) -> Router {
    let api = Router::new()
        .route("/api/v1/health", get(health))
        .route("/api/v1/spec", get(spec))
        .route("/api/v1/calc", post(calc))
        .route("/api/v1/ttest", post(ttest))
        .route("/api/v1/curves/{figure}", get(curves))
        .route("/api/v1/simulate", post(simulate))
        .with_state(AppState {
            max_sim_replicates: cfg.max_sim_replicates,
        });
    let app = match &cfg.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.fallback(not_found),
    };
    app.layer(cors(cfg))
}

/// Serves until Ctrl-C.
pub async fn serve(cfg: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(cfg.addr()).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(&cfg))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
