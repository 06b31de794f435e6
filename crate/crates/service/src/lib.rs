//! HTTP/JSON front end for running a learner against a human participant.
//!
//! Each loop iteration is split in two requests so the participant can take
//! their time: `begin` selects and returns the action to perform, `respond`
//! carries the participant's reaction and returns the updated learner view.
//!
//! | method | path                     | body                                   |
//! |--------|--------------------------|----------------------------------------|
//! | POST   | `/sessions`              | `{algorithm, config?, seed?}`          |
//! | GET    | `/sessions/{id}`         |                                        |
//! | POST   | `/sessions/{id}/begin`   |                                        |
//! | POST   | `/sessions/{id}/respond` | `{talk_length_s, distance_cm, emotion}`|
//! | GET    | `/sessions/{id}/log`     |                                        |
//! | POST   | `/sessions/{id}/end`     | `{interest, boredom_hardness}` or none |
//! | GET    | `/catalog`               |                                        |
//!
//! Errors are `{error, message, violations?}` with status 404 (unknown
//! session), 409 (begin/respond out of order) or 422 (invalid input).

pub mod api;
pub mod store;

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::http::{header, HeaderValue, Method};
use axum::routing::{get, post};
use axum::Router;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use api::AppState;
pub use store::{SessionStore, DEFAULT_IDLE_TIMEOUT};

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/health", get(api::health))
        .route("/catalog", get(api::get_catalog))
        .route("/sessions", post(api::create_session))
        .route("/sessions/{id}", get(api::get_session))
        .route("/sessions/{id}/begin", post(api::begin_step))
        .route("/sessions/{id}/respond", post(api::submit_response))
        .route("/sessions/{id}/log", get(api::get_log))
        .route("/sessions/{id}/end", post(api::end_session))
        .with_state(state)
}

/// `None` allows any origin.
pub fn cors_layer(
    origin: Option<&str>,
) -> Result<CorsLayer, axum::http::header::InvalidHeaderValue> {
    let allow = match origin {
        Some(o) => AllowOrigin::exact(HeaderValue::from_str(o)?),
        None => AllowOrigin::any(),
    };
    Ok(CorsLayer::new()
        .allow_origin(allow)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]))
}

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub addr: SocketAddr,
    pub idle_timeout: Duration,
    pub cors_origin: Option<String>,
}

pub async fn serve(opts: ServeOptions) -> std::io::Result<()> {
    let state = Arc::new(AppState::new(
        SessionStore::new(opts.idle_timeout),
        Arc::new(fracq_core::ActionCatalog::default()),
    ));
    let cors = cors_layer(opts.cors_origin.as_deref())
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e))?;
    let app = router(Arc::clone(&state)).layer(cors);

    let sweeper = Arc::clone(&state);
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            let dropped = sweeper.store.sweep(Instant::now());
            if dropped > 0 {
                tracing::info!(dropped, "expired idle sessions");
            }
        }
    });

    let listener = tokio::net::TcpListener::bind(opts.addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "session service listening");
    axum::serve(listener, app).await
}
