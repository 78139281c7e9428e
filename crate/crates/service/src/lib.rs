//! HTTP service over the analysis engine: upload exports, check what they
//! support, queue analyses and fetch results. State lives under one data
//! directory, so a restart picks up where the last process stopped.

pub mod api;
pub mod config;
pub mod jobs;
pub mod service;
pub mod store;

use std::io;
use std::sync::Arc;

pub use api::router;
pub use config::Config;
pub use jobs::{check_event_log, AnalysisJob, EventKind, JobEvent, JobState};
pub use service::{Service, ServiceError};
pub use store::{DatasetMeta, Store, StoreError};

/// Starts the service and the router for `config`.
pub fn app(config: &Config) -> Result<(Arc<Service>, axum::Router), ServiceError> {
    let svc = Service::start(config)?;
    let router = router(Arc::clone(&svc), config.upload_limit);
    Ok((svc, router))
}

/// Binds `0.0.0.0:<port>` and serves until Ctrl-C.
pub async fn serve(config: Config) -> io::Result<()> {
    let (_, router) = app(&config).map_err(io::Error::other)?;
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", config.port)).await?;
    tracing::info!(addr = %listener.local_addr()?, data_dir = %config.data_dir.display(), "listening");
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
