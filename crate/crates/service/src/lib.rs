//! HTTP/JSON play sessions: a client creates a session from a scenario or
//! game document, then posts human actions and receives the robot's replies.

mod api;
mod session;
mod store;

pub use api::{router, CreateRequest, ScenarioInfo, View};
pub use session::{Artifacts, Session, SessionError};
pub use store::{SessionStore, StoreConfig};

use std::net::SocketAddr;
use std::sync::Arc;

/// Serves the API on `addr` until the process is stopped.
pub async fn serve(addr: SocketAddr, config: StoreConfig) -> std::io::Result<()> {
    let store = Arc::new(SessionStore::new(config));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}
