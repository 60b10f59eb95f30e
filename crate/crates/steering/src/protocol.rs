//! Wire messages. Every message is a single JSON object with a version field
//! `"v": 1` and a `"type"` tag.

use encircle::evader::ControlLogEntry;
use encircle::geometry::Vec2;
use encircle::simulation::EpisodeResult;
use serde::{Deserialize, Serialize};

use crate::error::ProtocolError;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Start,
    /// Desired heading (rad) and speed (m/s); the speed is clamped to
    /// `[0, mu_max]`.
    Control {
        psi: f64,
        mu: f64,
    },
    Pause,
    Resume,
    Reset,
}

impl ClientMessage {
    pub fn name(&self) -> &'static str {
        match self {
            ClientMessage::Start => "start",
            ClientMessage::Control { .. } => "control",
            ClientMessage::Pause => "pause",
            ClientMessage::Resume => "resume",
            ClientMessage::Reset => "reset",
        }
    }

    pub fn parse(text: &str) -> Result<Self, ProtocolError> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
        let obj = value.as_object_mut().ok_or_else(|| ProtocolError::Malformed("expected a JSON object".into()))?;
        match obj.remove("v").and_then(|v| v.as_u64()) {
            Some(v) if v == u64::from(PROTOCOL_VERSION) => {}
            Some(v) => return Err(ProtocolError::UnsupportedVersion(v)),
            None => return Err(ProtocolError::Malformed("missing version field \"v\"".into())),
        }
        let msg: ClientMessage = serde_json::from_value(value).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
        if let ClientMessage::Control { psi, mu } = msg {
            if !psi.is_finite() || !mu.is_finite() {
                return Err(ProtocolError::Malformed("control values must be finite".into()));
            }
        }
        Ok(msg)
    }

    pub fn to_text(&self) -> String {
        versioned(self)
    }
}

/// Snapshot of a running session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFrame {
    pub t: f64,
    pub pursuers: Vec<Vec2>,
    pub evader: Vec2,
    /// Sub-triangle areas in hull edge order.
    pub areas: Vec<f64>,
    #[serde(rename = "V")]
    pub lyapunov: f64,
    pub d_min: f64,
    /// `"interior"` or `"edge"`.
    pub phase: String,
    /// 1-based labels of the active pair.
    pub active_edge: Option<[usize; 2]>,
    pub encircled: bool,
    pub captured: bool,
    pub t_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    State(StateFrame),
    End {
        result: EpisodeResult,
        /// Every control change applied during the episode, for offline replay.
        controls: Vec<ControlLogEntry>,
        /// Encirclement held and capture came within the bound.
        certified: bool,
    },
    Error {
        detail: String,
    },
}

impl ServerMessage {
    pub fn to_text(&self) -> String {
        versioned(self)
    }

    pub fn parse(text: &str) -> Result<Self, ProtocolError> {
        let mut value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ProtocolError::Malformed(e.to_string()))?;
        if let Some(obj) = value.as_object_mut() {
            obj.remove("v");
        }
        serde_json::from_value(value).map_err(|e| ProtocolError::Malformed(e.to_string()))
    }
}

fn versioned<T: Serialize>(msg: &T) -> String {
    let mut value = serde_json::to_value(msg).expect("messages serialize");
    if let Some(obj) = value.as_object_mut() {
        obj.insert("v".into(), PROTOCOL_VERSION.into());
    }
    value.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn client_messages_round_trip() {
        for msg in [
            ClientMessage::Start,
            ClientMessage::Control { psi: 0.5, mu: 0.3 },
            ClientMessage::Pause,
            ClientMessage::Resume,
            ClientMessage::Reset,
        ] {
            let text = msg.to_text();
            assert!(!text.contains('\n'));
            assert_eq!(ClientMessage::parse(&text).unwrap(), msg);
        }
    }

    #[test]
    fn parses_the_documented_forms() {
        assert_eq!(ClientMessage::parse(r#"{"v":1,"type":"start"}"#).unwrap(), ClientMessage::Start);
        assert_eq!(
            ClientMessage::parse(r#"{"v":1,"type":"control","psi":1.5,"mu":0.2}"#).unwrap(),
            ClientMessage::Control { psi: 1.5, mu: 0.2 }
        );
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(ClientMessage::parse("not json"), Err(ProtocolError::Malformed(_))));
        assert!(matches!(ClientMessage::parse(r#"{"type":"start"}"#), Err(ProtocolError::Malformed(_))));
        assert!(matches!(ClientMessage::parse(r#"{"v":2,"type":"start"}"#), Err(ProtocolError::UnsupportedVersion(2))));
        assert!(matches!(ClientMessage::parse(r#"{"v":1,"type":"jump"}"#), Err(ProtocolError::Malformed(_))));
        assert!(matches!(
            ClientMessage::parse(r#"{"v":1,"type":"control","psi":1.0}"#),
            Err(ProtocolError::Malformed(_))
        ));
    }

    #[test]
    fn server_messages_carry_version_and_tag() {
        let text = ServerMessage::Error { detail: "x".into() }.to_text();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["v"], 1);
        assert_eq!(v["type"], "error");
        assert_eq!(ServerMessage::parse(&text).unwrap(), ServerMessage::Error { detail: "x".into() });
    }

    #[test]
    fn state_frame_uses_capital_v() {
        let frame = StateFrame {
            t: 0.0,
            pursuers: vec![Vec2::new(0.0, 2.0)],
            evader: Vec2::ZERO,
            areas: vec![0.1],
            lyapunov: 2.0,
            d_min: 2.0,
            phase: "interior".into(),
            active_edge: None,
            encircled: true,
            captured: false,
            t_bound: Some(3.1),
        };
        let v: serde_json::Value = serde_json::from_str(&ServerMessage::State(frame).to_text()).unwrap();
        assert_eq!(v["type"], "state");
        assert_eq!(v["V"], 2.0);
        assert_eq!(v["pursuers"][0][1], 2.0);
    }
}
