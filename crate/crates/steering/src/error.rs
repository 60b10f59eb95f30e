use thiserror::Error;

/// Problems with a client message. Reported to the client; the session
/// carries on.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("unsupported protocol version {0}")]
    UnsupportedVersion(u64),
    #[error("'{message}' is not allowed while the session is {status}")]
    OutOfOrder { message: &'static str, status: &'static str },
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Simulation(#[from] encircle::Error),
}
