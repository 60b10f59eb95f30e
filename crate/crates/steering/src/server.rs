use std::future::Future;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;
use encircle::scenario::Scenario;
use tokio::net::TcpListener;
use tokio::sync::watch;
use tokio::time::{interval, Instant, MissedTickBehavior};
use tracing::{debug, info, warn};

use crate::error::SessionError;
use crate::protocol::ServerMessage;
use crate::session::Session;

pub const DEFAULT_FRAME_RATE: f64 = 30.0;

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub scenario: Scenario,
    /// State frames per second while running.
    pub frame_rate: f64,
    /// Simulated seconds per wall-clock second.
    pub pacing: f64,
}

impl ServerConfig {
    pub fn new(scenario: Scenario) -> Self {
        Self { scenario, frame_rate: DEFAULT_FRAME_RATE, pacing: 1.0 }
    }
}

#[derive(Clone)]
struct AppState {
    config: Arc<ServerConfig>,
    shutdown: watch::Receiver<bool>,
    next_id: Arc<AtomicU64>,
}

/// Router with the WebSocket endpoint at `/ws`. Flipping `shutdown` to true
/// ends every open session with an end message.
pub fn router(config: ServerConfig, shutdown: watch::Receiver<bool>) -> Router {
    let state = AppState { config: Arc::new(config), shutdown, next_id: Arc::new(AtomicU64::new(1)) };
    Router::new().route("/ws", get(upgrade)).with_state(state)
}

/// Serves until `signal` resolves, then ends open sessions and returns.
pub async fn serve(
    listener: TcpListener,
    config: ServerConfig,
    signal: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let (tx, rx) = watch::channel(false);
    let app = router(config, rx);
    info!(addr = %listener.local_addr()?, "steering service listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async move {
            signal.await;
            info!("shutting down");
            let _ = tx.send(true);
        })
        .await
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<AppState>) -> impl IntoResponse {
    let id = state.next_id.fetch_add(1, Ordering::Relaxed);
    ws.on_upgrade(move |socket| async move {
        if let Err(e) = connection(socket, id, state).await {
            warn!(session = id, error = %e, "session closed with an error");
        }
    })
}

async fn send(socket: &mut WebSocket, msg: &ServerMessage) -> Result<(), axum::Error> {
    socket.send(Message::Text(msg.to_text().into())).await
}

async fn connection(mut socket: WebSocket, id: u64, state: AppState) -> Result<(), axum::Error> {
    let cfg = &state.config;
    let mut shutdown = state.shutdown.clone();
    let mut session = match Session::new(id, cfg.scenario.clone(), cfg.pacing) {
        Ok(s) => s,
        Err(e) => {
            send(&mut socket, &ServerMessage::Error { detail: e.to_string() }).await?;
            return Ok(());
        }
    };
    info!(session = id, "connected");
    send(&mut socket, &ServerMessage::State(session.frame())).await?;

    let mut ticker = interval(Duration::from_secs_f64(1.0 / cfg.frame_rate));
    ticker.set_missed_tick_behavior(MissedTickBehavior::Skip);
    let mut last = Instant::now();

    loop {
        tokio::select! {
            incoming = socket.recv() => {
                let text = match incoming {
                    Some(Ok(Message::Text(text))) => text,
                    Some(Ok(Message::Close(_))) | None => break,
                    Some(Ok(_)) => continue,
                    Some(Err(e)) => {
                        debug!(session = id, error = %e, "receive failed");
                        break;
                    }
                };
                let was_running = session.is_running();
                match session.handle_text(text.as_str()) {
                    Ok(replies) => {
                        for reply in &replies {
                            send(&mut socket, reply).await?;
                        }
                    }
                    Err(SessionError::Protocol(e)) => {
                        send(&mut socket, &ServerMessage::Error { detail: e.to_string() }).await?;
                    }
                    Err(e) => {
                        send(&mut socket, &ServerMessage::Error { detail: e.to_string() }).await?;
                        break;
                    }
                }
                if !was_running && session.is_running() {
                    last = Instant::now();
                }
            }
            now = ticker.tick() => {
                let elapsed = now.duration_since(last);
                last = now;
                if !session.is_running() {
                    continue;
                }
                match session.advance(elapsed) {
                    Ok(end) => {
                        send(&mut socket, &ServerMessage::State(session.frame())).await?;
                        if let Some(end) = end {
                            send(&mut socket, &end).await?;
                        }
                    }
                    Err(e) => {
                        send(&mut socket, &ServerMessage::Error { detail: e.to_string() }).await?;
                        break;
                    }
                }
            }
            _ = shutdown.changed() => {
                if !matches!(session.status(), crate::session::Status::Ended(_)) {
                    let end = session.stop();
                    send(&mut socket, &end).await?;
                }
                let _ = socket.send(Message::Close(None)).await;
                break;
            }
        }
    }
    info!(session = id, "disconnected");
    Ok(())
}
