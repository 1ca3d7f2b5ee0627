use std::ffi::OsString;
use std::net::SocketAddr;

use anyhow::Context;
use clap::Parser;
use pluot_cli::http::{router, AppState};
use tracing_subscriber::EnvFilter;

/// HTTP render service: POST a plot spec to /render, get PNG or SVG back.
#[derive(Debug, Parser)]
#[command(name = "pluot-serve", version)]
struct Args {
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Directories filesystem stores may read from (path-list separated).
    #[arg(long, env = "PLUOT_STORE_ROOT")]
    store_root: Option<OsString>,
}

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();
    let args = Args::parse();
    let state = AppState::from_root_list(args.store_root.as_deref());
    let roots = state.policy().allowed_roots.clone().unwrap_or_default();
    if roots.is_empty() {
        tracing::warn!("no store roots configured; specs with filesystem or memory stores will be rejected");
    }
    let listener = tokio::net::TcpListener::bind(args.addr)
        .await
        .with_context(|| format!("binding {}", args.addr))?;
    tracing::info!(addr = %args.addr, ?roots, "listening");
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
