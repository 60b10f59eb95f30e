use std::time::Duration;

use encircle::evader::{EvaderControl, ExternalInbox, ExternalPolicy};
use encircle::scenario::Scenario;
use encircle::simulation::{Episode, EpisodeResult, StepStatus};
use tracing::{error, info};

use crate::error::{ProtocolError, SessionError};
use crate::protocol::{ClientMessage, ServerMessage, StateFrame};

/// Upper bound on steps taken per `advance` call, so a stalled connection
/// cannot trigger an unbounded catch-up burst.
const MAX_STEPS_PER_ADVANCE: u32 = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Ready,
    Running,
    Paused,
    Ended(Box<EpisodeResult>),
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Ready => "ready",
            Status::Running => "running",
            Status::Paused => "paused",
            Status::Ended(_) => "ended",
        }
    }
}

/// One human-steered episode.
pub struct Session {
    id: u64,
    scenario: Scenario,
    episode: Episode,
    inbox: ExternalInbox,
    policy: ExternalPolicy,
    status: Status,
    /// Simulated seconds per wall-clock second.
    pacing: f64,
    /// Simulated time owed to the episode but not yet stepped.
    backlog: f64,
}

impl Session {
    pub fn new(id: u64, scenario: Scenario, pacing: f64) -> Result<Self, SessionError> {
        let episode = Episode::new(&scenario)?;
        let inbox = ExternalInbox::new();
        Ok(Self {
            id,
            policy: ExternalPolicy::live(inbox.clone()),
            inbox,
            episode,
            scenario,
            status: Status::Ready,
            pacing,
            backlog: 0.0,
        })
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn status(&self) -> &Status {
        &self.status
    }

    pub fn episode(&self) -> &Episode {
        &self.episode
    }

    pub fn is_running(&self) -> bool {
        self.status == Status::Running
    }

    /// Applies a client message and returns any immediate replies.
    pub fn handle_message(&mut self, msg: ClientMessage) -> Result<Vec<ServerMessage>, SessionError> {
        let out_of_order = |status: &Status| ProtocolError::OutOfOrder { message: msg.name(), status: status.name() };
        match (msg, &self.status) {
            (ClientMessage::Start, Status::Ready) => {
                info!(session = self.id, "start");
                self.status = Status::Running;
                self.backlog = 0.0;
                Ok(vec![ServerMessage::State(self.frame())])
            }
            (ClientMessage::Control { psi, mu }, Status::Ready | Status::Running | Status::Paused) => {
                self.inbox.post(EvaderControl { mu, psi });
                Ok(Vec::new())
            }
            (ClientMessage::Pause, Status::Running) => {
                self.status = Status::Paused;
                Ok(Vec::new())
            }
            (ClientMessage::Resume, Status::Paused) => {
                self.status = Status::Running;
                Ok(Vec::new())
            }
            (ClientMessage::Reset, _) => {
                info!(session = self.id, "reset");
                *self = Session::new(self.id, self.scenario.clone(), self.pacing)?;
                Ok(vec![ServerMessage::State(self.frame())])
            }
            (_, status) => Err(out_of_order(status).into()),
        }
    }

    pub fn handle_text(&mut self, text: &str) -> Result<Vec<ServerMessage>, SessionError> {
        self.handle_message(ClientMessage::parse(text)?)
    }

    /// Steps the episode by `elapsed` wall-clock time scaled by the pacing
    /// factor. Returns the end message once the episode finishes.
    pub fn advance(&mut self, elapsed: Duration) -> Result<Option<ServerMessage>, SessionError> {
        if !self.is_running() {
            return Ok(None);
        }
        let dt = self.scenario.dt;
        self.backlog += elapsed.as_secs_f64() * self.pacing;
        let mut steps = 0;
        while self.backlog >= dt && steps < MAX_STEPS_PER_ADVANCE {
            self.backlog -= dt;
            steps += 1;
            if self.episode.step(&mut self.policy)? == StepStatus::Ended {
                return Ok(Some(self.end()));
            }
        }
        if steps == MAX_STEPS_PER_ADVANCE {
            self.backlog = 0.0;
        }
        Ok(None)
    }

    /// Ends the session now, whether or not the evader was captured.
    pub fn stop(&mut self) -> ServerMessage {
        self.episode.stop();
        self.end()
    }

    fn end(&mut self) -> ServerMessage {
        let result = self.episode.result().expect("episode ended").clone();
        let certified = certify(&result);
        if !certified {
            error!(session = self.id, ?result, "session ended with a broken capture certificate");
        }
        info!(session = self.id, t_capture = ?result.t_capture, tau = ?result.tau, "session ended");
        self.status = Status::Ended(Box::new(result.clone()));
        ServerMessage::End { result, controls: self.policy.log().to_vec(), certified }
    }

    pub fn frame(&self) -> StateFrame {
        let world = self.episode.world();
        let phase = self.episode.phase().mode;
        StateFrame {
            t: world.t,
            pursuers: world.pursuers.clone(),
            evader: world.evader,
            areas: self.episode.areas().areas.clone(),
            lyapunov: encircle::analysis::lyapunov_value(world),
            d_min: world.d_min(),
            phase: phase.label().to_string(),
            active_edge: phase.active_edge().map(|e| [e.j + 1, e.k + 1]),
            encircled: self.episode.is_encircled(),
            captured: self.episode.result().is_some_and(|r| r.captured),
            t_bound: self.episode.scenario().t_bound(),
        }
    }
}

/// Encirclement held throughout and, where a bound exists, capture came
/// within it. A session stopped before capture is judged on encirclement
/// alone.
pub fn certify(result: &EpisodeResult) -> bool {
    result.encirclement_ok && result.bound_respected() && result.tau.is_none_or(|tau| tau < 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn session() -> Session {
        Session::new(1, Scenario::table1(), 1.0).unwrap()
    }

    fn run_to_end(s: &mut Session) -> ServerMessage {
        loop {
            if let Some(end) = s.advance(Duration::from_millis(50)).unwrap() {
                return end;
            }
        }
    }

    #[test]
    fn state_machine_transitions() {
        let mut s = session();
        assert!(matches!(
            s.handle_message(ClientMessage::Pause),
            Err(SessionError::Protocol(ProtocolError::OutOfOrder { message: "pause", status: "ready" }))
        ));
        s.handle_message(ClientMessage::Start).unwrap();
        assert!(matches!(
            s.handle_message(ClientMessage::Start),
            Err(SessionError::Protocol(ProtocolError::OutOfOrder { message: "start", status: "running" }))
        ));
        s.handle_message(ClientMessage::Pause).unwrap();
        assert_eq!(s.status(), &Status::Paused);
        let t = s.frame().t;
        assert!(s.advance(Duration::from_secs(1)).unwrap().is_none());
        assert_eq!(s.frame().t, t);
        s.handle_message(ClientMessage::Resume).unwrap();
        run_to_end(&mut s);
        assert!(matches!(s.status(), Status::Ended(_)));
        assert!(s.handle_message(ClientMessage::Control { psi: 0.0, mu: 0.1 }).is_err());
        s.handle_message(ClientMessage::Reset).unwrap();
        assert_eq!(s.status(), &Status::Ready);
        assert_eq!(s.frame().t, 0.0);
    }

    #[test]
    fn stationary_human_is_caught_by_pursuer_one() {
        let mut s = session();
        s.handle_message(ClientMessage::Start).unwrap();
        match run_to_end(&mut s) {
            ServerMessage::End { result, certified, controls } => {
                assert!((result.t_capture.unwrap() - 0.7).abs() < 0.02);
                assert_eq!(result.captured_by, Some(1));
                assert!(certified);
                assert_eq!(controls.len(), 0);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(s.frame().captured);
    }

    #[test]
    fn control_before_start_applies_from_the_first_step() {
        let mut s = session();
        s.handle_message(ClientMessage::Control { psi: 1.0, mu: 9.9 }).unwrap();
        s.handle_message(ClientMessage::Start).unwrap();
        let ServerMessage::End { controls, .. } = run_to_end(&mut s) else { panic!() };
        assert_eq!(controls[0].step, 0);
        assert_eq!(controls[0].mu, 0.7);
        assert_eq!(controls[0].psi, 1.0);
    }

    #[test]
    fn pacing_scales_simulated_time() {
        let mut s = Session::new(1, Scenario::table1(), 0.5).unwrap();
        s.handle_message(ClientMessage::Start).unwrap();
        s.advance(Duration::from_millis(400)).unwrap();
        assert!((s.frame().t - 0.2).abs() < 0.006);
    }

    #[test]
    fn frame_areas_match_a_fresh_recomputation() {
        let mut s = session();
        s.handle_message(ClientMessage::Control { psi: 0.3, mu: 0.7 }).unwrap();
        s.handle_message(ClientMessage::Start).unwrap();
        s.advance(Duration::from_millis(200)).unwrap();
        let f = s.frame();
        let order = &s.episode().scenario().order;
        let fresh = encircle::geometry::area_vector(&f.pursuers, order, f.evader);
        assert_eq!(f.areas, fresh.areas);
    }

    #[test]
    fn stop_reports_an_uncaptured_end() {
        let mut s = session();
        s.handle_message(ClientMessage::Start).unwrap();
        s.advance(Duration::from_millis(100)).unwrap();
        let ServerMessage::End { result, certified, .. } = s.stop() else { panic!() };
        assert!(!result.captured);
        assert!(certified);
    }
}
