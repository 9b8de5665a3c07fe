//! HTTP face of the annotation engine.
//!
//! | Method | Path | |
//! |---|---|---|
//! | POST | `/annotations` | ingest an RDF document (Turtle or N-Triples); URN ids are rebound under this service |
//! | GET | `/annotations/{id}` | the stored graph, format by `Accept` |
//! | GET | `/annotations/{id}.json` | lossy JSON view for browser clients |
//! | GET | `/search?target=&from=&to=&q=&region=` | JSON list of annotation URIs |
//! | POST | `/harvest` | `{"feed": uri}` → harvest report |
//! | GET | `/timegate/{original}` | 302 to the memento closest to `Accept-Datetime` |
//! | GET | `/mementos/{id}` | archived representation with `Memento-Datetime` |
//! | POST | `/mementos` | register a memento |
//! | GET | `/ui/...` | static files from the configured directory |

pub mod api;
pub mod config;
pub mod harvest;
pub mod negotiate;
pub mod pointer;
pub mod projection;
pub mod state;

use std::sync::Arc;

pub use api::{SearchParams, router};
pub use config::Config;
pub use harvest::{HarvestError, HarvestFailure, HarvestReport, harvest_feed};
pub use negotiate::{NegotiationError, NegotiationResult, negotiate};
pub use state::{AppState, IngestError, StateError};

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("cannot listen on {addr}: {source}")]
    Bind {
        addr: std::net::SocketAddr,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Runs the service until `shutdown` resolves.
pub async fn serve(
    config: Config,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> Result<(), ServeError> {
    let state = Arc::new(AppState::open(&config)?);
    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.listen,
            source,
        })?;
    tracing::info!(addr = %config.listen, base = %state.base_url(), "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await?;
    Ok(())
}
