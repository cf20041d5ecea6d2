//! HTTP API over cyclekit models: the component palette, validation,
//! design sizing, off-design simulation and sweeps with progress polling.
//!
//! Every route is mounted under both `/api` and `/api/v1`. Models travel in
//! the request body in the model-file schema; the only server-side state is
//! the sweep job table.

mod error;
mod palette;
mod routes;
mod sweeps;

use std::net::SocketAddr;

use cyclekit::fluids::FluidDatabase;

pub use error::ApiError;
pub use palette::{palette, FamilyEntry, ParamEntry, QuantityEntry, Variadic};
pub use routes::{router, router_with_database};
pub use sweeps::{Job, JobState};

/// Binds `addr` and serves the API until the process is stopped.
pub async fn serve(addr: SocketAddr, db: FluidDatabase) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router_with_database(db)).await
}
