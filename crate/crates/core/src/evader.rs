//! Evader policies.
//!
//! Every policy sees only the positions of all agents, the clock and its own
//! private state (random stream or steering inbox). Speeds are clamped to
//! `[0, mu_max]` before they reach the integrator.

use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{
    area_vector, closest_point_on_segment, detect_active_edge, edge_frames, EdgeDetection, HullOrder, Thresholds, Vec2,
};
use crate::simulation::WorldState;

/// Evader speed (m/s) and heading (radians).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvaderControl {
    pub mu: f64,
    pub psi: f64,
}

impl EvaderControl {
    pub fn clamped(self, mu_max: f64) -> Self {
        let mu = if self.mu.is_nan() { 0.0 } else { self.mu.clamp(0.0, mu_max) };
        let psi = if self.psi.is_finite() { self.psi } else { 0.0 };
        Self { mu, psi }
    }

    pub fn velocity(self) -> Vec2 {
        Vec2::from_angle(self.psi) * self.mu
    }
}

/// What a policy is allowed to look at.
#[derive(Debug, Clone, Copy)]
pub struct Observation<'a> {
    pub step: u64,
    pub world: &'a WorldState,
    pub order: &'a HullOrder,
    pub thresholds: &'a Thresholds,
    pub mu_max: f64,
}

impl Observation<'_> {
    pub fn t(&self) -> f64 {
        self.world.t
    }
}

pub trait EvaderPolicy {
    fn control(&mut self, obs: &Observation<'_>) -> EvaderControl;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Greedy,
    Switching,
    Random,
    Stationary,
    ClosestLink,
    External,
}

impl std::str::FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "greedy" | "gp" => Ok(Self::Greedy),
            "switching" | "sp" => Ok(Self::Switching),
            "random" | "rp" => Ok(Self::Random),
            "stationary" | "stp" => Ok(Self::Stationary),
            "closest_link" | "clp" => Ok(Self::ClosestLink),
            "external" => Ok(Self::External),
            other => Err(format!("unknown policy `{other}`")),
        }
    }
}

/// Serialized description of an evader policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    /// Full edge/interior cycle of the switching policy (s).
    #[serde(default = "PolicySpec::default_period")]
    pub period: f64,
    /// Hold time of each random heading (s).
    #[serde(default = "PolicySpec::default_hold")]
    pub hold: f64,
    /// Random stream seed; falls back to the scenario seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Fraction of `mu_max` the scripted policies run at.
    #[serde(default = "PolicySpec::default_speed_fraction")]
    pub speed_fraction: f64,
}

impl PolicySpec {
    fn default_period() -> f64 {
        0.3
    }
    fn default_hold() -> f64 {
        0.1
    }
    fn default_speed_fraction() -> f64 {
        1.0
    }

    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            period: Self::default_period(),
            hold: Self::default_hold(),
            seed: None,
            speed_fraction: Self::default_speed_fraction(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(format!("policy period must be > 0, got {}", self.period));
        }
        if !(self.hold > 0.0 && self.hold.is_finite()) {
            return Err(format!("policy hold must be > 0, got {}", self.hold));
        }
        if !(0.0..=1.0).contains(&self.speed_fraction) {
            return Err(format!("speed_fraction must be in [0, 1], got {}", self.speed_fraction));
        }
        Ok(())
    }

    /// Instantiates the policy. `inbox` feeds the external policy; without one
    /// it never receives a command and stays put.
    pub fn build(&self, scenario_seed: u64, inbox: Option<ExternalInbox>) -> Box<dyn EvaderPolicy + Send> {
        let f = self.speed_fraction;
        match self.kind {
            PolicyKind::Greedy => Box::new(Greedy { speed_fraction: f }),
            PolicyKind::Switching => Box::new(Switching::new(self.period, f)),
            PolicyKind::Random => Box::new(RandomHeading::new(self.seed.unwrap_or(scenario_seed), self.hold, f)),
            PolicyKind::Stationary => Box::new(Stationary),
            PolicyKind::ClosestLink => Box::new(ClosestLink { speed_fraction: f }),
            PolicyKind::External => Box::new(ExternalPolicy::live(inbox.unwrap_or_default())),
        }
    }
}

impl Default for PolicySpec {
    fn default() -> Self {
        Self::new(PolicyKind::Greedy)
    }
}

fn nearest_pursuer(world: &WorldState) -> usize {
    world
        .pursuers
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(best, best_d), (i, p)| {
            let d = p.distance(world.evader);
            if d < best_d {
                (i, d)
            } else {
                (best, best_d)
            }
        })
        .0
}

/// Flee the nearest pursuer (lowest index on ties) at full speed.
pub fn greedy(obs: &Observation<'_>) -> EvaderControl {
    let world = obs.world;
    let away = world.evader - world.pursuers[nearest_pursuer(world)];
    EvaderControl { mu: obs.mu_max, psi: away.angle() }
}

pub fn stationary() -> EvaderControl {
    EvaderControl { mu: 0.0, psi: 0.0 }
}

/// Closest point on the nearest hull edge (point-to-segment distance, lowest
/// edge position on ties).
pub fn nearest_edge_foot(world: &WorldState, order: &HullOrder) -> (usize, Vec2) {
    let (position, foot, _) = order
        .edges()
        .map(|edge| {
            let foot = closest_point_on_segment(world.evader, world.pursuers[edge.j], world.pursuers[edge.k]);
            (edge.position, foot, foot.distance(world.evader))
        })
        .fold((0, world.evader, f64::INFINITY), |best, cand| if cand.2 < best.2 { cand } else { best });
    (position, foot)
}

fn edge_detection(obs: &Observation<'_>) -> (EdgeDetection, Vec<f64>) {
    let world = obs.world;
    let areas = area_vector(&world.pursuers, obs.order, world.evader);
    match edge_frames(&world.pursuers, obs.order, world.evader) {
        Ok(frames) => {
            let alphas = frames.iter().map(|f| f.alpha).collect();
            (detect_active_edge(&areas, &frames, obs.thresholds), alphas)
        }
        Err(_) => (EdgeDetection::None, Vec::new()),
    }
}

/// Head for the nearest edge; once on it, push along its outward normal.
pub fn closest_link(obs: &Observation<'_>) -> EvaderControl {
    let (detection, alphas) = edge_detection(obs);
    match detection {
        EdgeDetection::Edge(edge) | EdgeDetection::Violation(edge) => {
            EvaderControl { mu: obs.mu_max, psi: alphas[edge.position] - FRAC_PI_2 }
        }
        EdgeDetection::None => toward_nearest_edge(obs),
    }
}

fn toward_nearest_edge(obs: &Observation<'_>) -> EvaderControl {
    let world = obs.world;
    let (position, foot) = nearest_edge_foot(world, obs.order);
    let psi = match (foot - world.evader).normalized(1e-12) {
        Some(dir) => dir.angle(),
        None => {
            let edge = obs.order.edge(position);
            (world.pursuers[edge.k] - world.pursuers[edge.j]).angle() - FRAC_PI_2
        }
    };
    EvaderControl { mu: obs.mu_max, psi }
}

fn toward_centroid(obs: &Observation<'_>) -> EvaderControl {
    let world = obs.world;
    let n = world.pursuers.len() as f64;
    let centroid = world.pursuers.iter().fold(Vec2::ZERO, |acc, &p| acc + p) * (1.0 / n);
    EvaderControl { mu: obs.mu_max, psi: (centroid - world.evader).angle() }
}

#[derive(Debug, Clone, Copy)]
pub struct Greedy {
    pub speed_fraction: f64,
}

impl EvaderPolicy for Greedy {
    fn control(&mut self, obs: &Observation<'_>) -> EvaderControl {
        scale(greedy(obs), self.speed_fraction)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Stationary;

impl EvaderPolicy for Stationary {
    fn control(&mut self, _obs: &Observation<'_>) -> EvaderControl {
        stationary()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ClosestLink {
    pub speed_fraction: f64,
}

impl EvaderPolicy for ClosestLink {
    fn control(&mut self, obs: &Observation<'_>) -> EvaderControl {
        scale(closest_link(obs), self.speed_fraction)
    }
}

/// Reach the nearest edge, then alternate every half period between holding
/// the edge and running for the pursuers' centroid.
#[derive(Debug, Clone)]
pub struct Switching {
    period: f64,
    speed_fraction: f64,
    first_contact: Option<f64>,
}

impl Switching {
    pub fn new(period: f64, speed_fraction: f64) -> Self {
        Self { period, speed_fraction, first_contact: None }
    }

    pub fn first_contact(&self) -> Option<f64> {
        self.first_contact
    }
}

impl EvaderPolicy for Switching {
    fn control(&mut self, obs: &Observation<'_>) -> EvaderControl {
        let t = obs.t();
        if self.first_contact.is_none() {
            if let (EdgeDetection::Edge(_) | EdgeDetection::Violation(_), _) = edge_detection(obs) {
                self.first_contact = Some(t);
            }
        }
        let control = match self.first_contact {
            None => toward_nearest_edge(obs),
            Some(t0) => {
                let half = ((t - t0) / (0.5 * self.period) + 1e-9).floor() as u64;
                if half.is_multiple_of(2) {
                    closest_link(obs)
                } else {
                    toward_centroid(obs)
                }
            }
        };
        scale(control, self.speed_fraction)
    }
}

/// Uniform random heading, redrawn every `hold` seconds from a private
/// seeded stream.
#[derive(Debug, Clone)]
pub struct RandomHeading {
    rng: ChaCha8Rng,
    hold: f64,
    speed_fraction: f64,
    segment: Option<u64>,
    psi: f64,
}

impl RandomHeading {
    pub fn new(seed: u64, hold: f64, speed_fraction: f64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), hold, speed_fraction, segment: None, psi: 0.0 }
    }

    /// Heading for time `t`, drawing a new one when `t` enters a new hold
    /// window.
    pub fn heading_at(&mut self, t: f64) -> f64 {
        let segment = (t / self.hold + 1e-9).floor().max(0.0) as u64;
        if self.segment != Some(segment) {
            self.segment = Some(segment);
            self.psi = self.rng.random_range(0.0..TAU);
        }
        self.psi
    }
}

impl EvaderPolicy for RandomHeading {
    fn control(&mut self, obs: &Observation<'_>) -> EvaderControl {
        let psi = self.heading_at(obs.t());
        EvaderControl { mu: obs.mu_max * self.speed_fraction, psi }
    }
}

fn scale(c: EvaderControl, fraction: f64) -> EvaderControl {
    EvaderControl { mu: c.mu * fraction, psi: c.psi }
}

/// Single-slot mailbox between a steering connection (producer) and the
/// episode loop (consumer). Only the most recent command is kept.
#[derive(Debug, Clone, Default)]
pub struct ExternalInbox {
    slot: Arc<Mutex<Option<EvaderControl>>>,
}

impl ExternalInbox {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn post(&self, control: EvaderControl) {
        *self.slot.lock().unwrap_or_else(|e| e.into_inner()) = Some(control);
    }

    pub fn latest(&self) -> Option<EvaderControl> {
        *self.slot.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn clear(&self) {
        *self.slot.lock().unwrap_or_else(|e| e.into_inner()) = None;
    }
}

/// One change of the externally supplied control, keyed by the step it was
/// first applied at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlLogEntry {
    pub step: u64,
    pub t: f64,
    pub mu: f64,
    pub psi: f64,
}

#[derive(Debug, Clone)]
enum ExternalSource {
    Live(ExternalInbox),
    Replay { log: Vec<ControlLogEntry>, cursor: usize },
}

/// Externally driven evader: zero-order hold on the latest received command,
/// `(0, 0)` until the first one arrives. Every change is logged so a session
/// can be replayed offline step for step.
#[derive(Debug, Clone)]
pub struct ExternalPolicy {
    source: ExternalSource,
    current: Option<EvaderControl>,
    log: Vec<ControlLogEntry>,
}

impl ExternalPolicy {
    pub fn live(inbox: ExternalInbox) -> Self {
        Self { source: ExternalSource::Live(inbox), current: None, log: Vec::new() }
    }

    pub fn replay(log: Vec<ControlLogEntry>) -> Self {
        Self { source: ExternalSource::Replay { log, cursor: 0 }, current: None, log: Vec::new() }
    }

    pub fn log(&self) -> &[ControlLogEntry] {
        &self.log
    }

    pub fn take_log(&mut self) -> Vec<ControlLogEntry> {
        std::mem::take(&mut self.log)
    }
}

/// Latest received control with the speed clamped, or `(0, 0)` before any.
pub fn external_control(inbox: &ExternalInbox, mu_max: f64) -> EvaderControl {
    inbox.latest().map(|c| c.clamped(mu_max)).unwrap_or_else(stationary)
}

impl EvaderPolicy for ExternalPolicy {
    fn control(&mut self, obs: &Observation<'_>) -> EvaderControl {
        let raw = match &mut self.source {
            ExternalSource::Live(inbox) => inbox.latest(),
            ExternalSource::Replay { log, cursor } => {
                while *cursor < log.len() && log[*cursor].step <= obs.step {
                    *cursor += 1;
                }
                cursor.checked_sub(1).map(|i| EvaderControl { mu: log[i].mu, psi: log[i].psi })
            }
        };
        let Some(raw) = raw else {
            return stationary();
        };
        let control = raw.clamped(obs.mu_max);
        if self.current != Some(control) {
            self.current = Some(control);
            self.log.push(ControlLogEntry { step: obs.step, t: obs.t(), mu: control.mu, psi: control.psi });
        }
        control
    }
}
