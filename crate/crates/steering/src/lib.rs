//! Live steering service: a person drives the evader over a WebSocket while
//! the pursuers run the encirclement-preserving controller.
//!
//! Connect to `/ws`, send `{"v":1,"type":"start"}`, then stream
//! `{"v":1,"type":"control","psi":..,"mu":..}` messages. The server answers
//! with `state` frames at a fixed rate and one `end` message carrying the
//! episode result and the control log, which replays offline to the same
//! trace.

pub mod error;
pub mod protocol;
pub mod server;
pub mod session;

pub use error::{ProtocolError, SessionError};
pub use protocol::{ClientMessage, ServerMessage, StateFrame};
pub use server::{router, serve, ServerConfig};
pub use session::Session;
