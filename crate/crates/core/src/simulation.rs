//! Fixed-step episode engine.
//!
//! Kinematics are integrated with explicit Euler under a zero-order hold on
//! all controls. The edge phase is entered when an edge's area drops to
//! `eps_act` with the evader over the segment and left once the area climbs
//! back to `eps_exit`.

use serde::{Deserialize, Serialize};
use tracing::{debug, warn};

use crate::analysis::{capture_time_bound, lyapunov_value};
use crate::error::{Error, Result};
use crate::evader::{EvaderControl, EvaderPolicy, Observation};
use crate::geometry::{
    area_vector, detect_active_edge, edge_frames, AreaVector, Edge, EdgeDetection, EdgeFrame, HullOrder, Thresholds,
    Vec2,
};
use crate::pursuit::{encirclement_condition, PursuerStrategy, SwitchedPursuit};
use crate::scenario::{ControllerMode, Scenario};

/// Speeds and capture radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentParams {
    /// Per-pursuer speed (m/s).
    pub speeds: Vec<f64>,
    /// Evader maximum speed (m/s).
    pub mu_max: f64,
    /// Capture radius (m).
    pub capture_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldState {
    pub t: f64,
    pub pursuers: Vec<Vec2>,
    pub evader: Vec2,
}

impl WorldState {
    pub fn distances(&self) -> impl Iterator<Item = f64> + '_ {
        self.pursuers.iter().map(move |p| p.distance(self.evader))
    }

    pub fn d_min(&self) -> f64 {
        self.distances().fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.evader.is_finite() && self.pursuers.iter().all(|p| p.is_finite())
    }
}

/// Controls held constant over one integration step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlInput {
    /// Unit heading vectors, one per pursuer.
    pub pursuer_headings: Vec<Vec2>,
    pub evader: EvaderControl,
}

impl ControlInput {
    /// Heading angles θ_i in `[0, 2π)`.
    pub fn heading_angles(&self) -> Vec<f64> {
        self.pursuer_headings.iter().map(|h| crate::geometry::wrap_angle(h.angle())).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "edge", rename_all = "snake_case")]
pub enum Phase {
    Interior,
    Edge(Edge),
}

impl Phase {
    pub fn active_edge(&self) -> Option<Edge> {
        match self {
            Phase::Interior => None,
            Phase::Edge(e) => Some(*e),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Phase::Interior => "interior",
            Phase::Edge(_) => "edge",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub mode: Phase,
    pub entered_at: f64,
}

impl PhaseState {
    pub fn interior(t: f64) -> Self {
        Self { mode: Phase::Interior, entered_at: t }
    }

    /// Applies the hysteresis rule to this step's edge scan.
    ///
    /// A violation always forces the edge phase on the offending edge. An
    /// edge phase is kept while its area stays below `eps_exit` and the
    /// evader remains over the segment, unless a different edge has become
    /// properly active and the current one no longer is.
    pub fn update(
        &self,
        detection: EdgeDetection,
        areas: &AreaVector,
        frames: &[EdgeFrame],
        thresholds: &Thresholds,
        t: f64,
    ) -> PhaseState {
        let next = match (self.mode, detection) {
            (_, EdgeDetection::Violation(edge)) => Phase::Edge(edge),
            (Phase::Edge(current), detected) => {
                let a = areas.get(current.position);
                let holding = a < thresholds.eps_exit && thresholds.lambda_in_range(frames[current.position].lambda);
                match detected {
                    EdgeDetection::Edge(other) if other != current && (!holding || a > thresholds.eps_act) => {
                        Phase::Edge(other)
                    }
                    _ if holding => Phase::Edge(current),
                    EdgeDetection::Edge(other) => Phase::Edge(other),
                    _ => Phase::Interior,
                }
            }
            (Phase::Interior, EdgeDetection::Edge(edge)) => Phase::Edge(edge),
            (Phase::Interior, EdgeDetection::None) => Phase::Interior,
        };
        if next == self.mode {
            *self
        } else {
            PhaseState { mode: next, entered_at: t }
        }
    }
}

/// Snapshot of one integration step (state at the start of the step, with
/// the phase used during it). The final record holds the terminal state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub pursuers: Vec<Vec2>,
    pub evader: Vec2,
    pub areas: Vec<f64>,
    /// Sum of pursuer-evader distances (m).
    pub lyapunov: f64,
    pub d_min: f64,
    pub phase: Phase,
    pub encircled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub order: HullOrder,
    pub records: Vec<TraceRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub captured: bool,
    /// Interpolated first time some pursuer reaches the capture radius.
    pub t_capture: Option<f64>,
    /// 1-based label of the capturing pursuer, matching the `p1..pn` naming.
    pub captured_by: Option<usize>,
    /// Time at which the episode stopped (capture step end or `t_max`).
    pub t_end: f64,
    pub steps: u64,
    pub v0: f64,
    /// Analytic capture-time bound; absent when the speed ratio admits none.
    pub t_bound: Option<f64>,
    pub tau: Option<f64>,
    pub min_area_seen: f64,
    pub encirclement_ok: bool,
    /// Largest per-step finite difference of the Lyapunov value (m/s); absent
    /// if no step was taken.
    pub max_lyapunov_rate: Option<f64>,
    /// Steps at which the fixed hull labels no longer formed a convex polygon.
    pub redundancy_warnings: u64,
    /// Edge-phase steps at which the encirclement inequality failed.
    pub condition_failures: u64,
}

impl EpisodeResult {
    /// `t_capture <= t_bound` when both exist.
    pub fn bound_respected(&self) -> bool {
        match (self.t_capture, self.t_bound) {
            (Some(t), Some(b)) => t <= b,
            _ => true,
        }
    }
}

/// Explicit Euler step of the single-integrator kinematics.
pub fn step(world: &WorldState, u: &ControlInput, speeds: &[f64], dt: f64) -> WorldState {
    WorldState {
        t: world.t + dt,
        pursuers: world
            .pursuers
            .iter()
            .zip(&u.pursuer_headings)
            .zip(speeds)
            .map(|((&p, &h), &v)| p + h * (dt * v))
            .collect(),
        evader: world.evader + u.evader.velocity() * dt,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Capture {
    pub pursuer: usize,
    pub t: f64,
}

/// First pursuer whose distance crosses `r_c` during the step, with the
/// crossing time found by linear interpolation of the distance.
pub fn detect_capture(prev: &WorldState, next: &WorldState, capture_radius: f64) -> Option<Capture> {
    let dt = next.t - prev.t;
    prev.distances()
        .zip(next.distances())
        .enumerate()
        .filter(|(_, (_, d1))| *d1 <= capture_radius)
        .map(|(i, (d0, d1))| {
            let frac = if d0 > d1 { ((d0 - capture_radius) / (d0 - d1)).clamp(0.0, 1.0) } else { 0.0 };
            Capture { pursuer: i, t: prev.t + frac * dt }
        })
        .fold(None, |best: Option<Capture>, c| match best {
            Some(b) if b.t <= c.t => Some(b),
            _ => Some(c),
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Running,
    Ended,
}

/// One episode, advanced a step at a time. Offline runs and live steering
/// sessions share this loop.
pub struct Episode {
    scenario: Scenario,
    strategy: Box<dyn PursuerStrategy + Send + Sync>,
    world: WorldState,
    phase: PhaseState,
    areas: AreaVector,
    step_index: u64,
    v0: f64,
    t_bound: Option<f64>,
    min_area: f64,
    max_v_rate: f64,
    redundancy_warnings: u64,
    condition_failures: u64,
    records: Vec<TraceRecord>,
    record_trace: bool,
    result: Option<EpisodeResult>,
}

impl Episode {
    /// Episode driven by the switched encirclement-preserving controller.
    pub fn new(scenario: &Scenario) -> Result<Self> {
        let strategy = SwitchedPursuit { selection: scenario.phi };
        Self::with_strategy(scenario, Box::new(strategy))
    }

    pub fn with_strategy(scenario: &Scenario, strategy: Box<dyn PursuerStrategy + Send + Sync>) -> Result<Self> {
        let world = scenario.initial_world();
        let areas = area_vector(&world.pursuers, &scenario.order, world.evader);
        if areas.min() <= 0.0 {
            return Err(Error::NotInitiallyEncircled { min_area: areas.min() });
        }
        if world.d_min() < scenario.params.capture_radius {
            return Err(Error::InvalidState(format!(
                "evader starts within the capture radius (d_min = {})",
                world.d_min()
            )));
        }
        let v0 = lyapunov_value(&world);
        let t_bound = scenario.t_bound();
        Ok(Self {
            scenario: scenario.clone(),
            strategy,
            phase: PhaseState::interior(0.0),
            min_area: areas.min(),
            areas,
            world,
            step_index: 0,
            v0,
            t_bound,
            max_v_rate: f64::NEG_INFINITY,
            redundancy_warnings: 0,
            condition_failures: 0,
            records: Vec::new(),
            record_trace: true,
            result: None,
        })
    }

    /// Stop accumulating trace records (Monte Carlo trials only need the
    /// result).
    pub fn without_trace(mut self) -> Self {
        self.record_trace = false;
        self
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn world(&self) -> &WorldState {
        &self.world
    }

    pub fn phase(&self) -> &PhaseState {
        &self.phase
    }

    pub fn areas(&self) -> &AreaVector {
        &self.areas
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    pub fn result(&self) -> Option<&EpisodeResult> {
        self.result.as_ref()
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn is_encircled(&self) -> bool {
        self.areas.min() >= -self.scenario.thresholds.eps_violation
    }

    fn snapshot(&self) -> TraceRecord {
        TraceRecord {
            t: self.world.t,
            pursuers: self.world.pursuers.clone(),
            evader: self.world.evader,
            areas: self.areas.areas.clone(),
            lyapunov: lyapunov_value(&self.world),
            d_min: self.world.d_min(),
            phase: self.phase.mode,
            encircled: self.is_encircled(),
        }
    }

    /// Advances one step. Returns [`StepStatus::Ended`] once the evader has
    /// been captured or `t_max` is reached; further calls are no-ops.
    pub fn step(&mut self, policy: &mut dyn EvaderPolicy) -> Result<StepStatus> {
        if self.result.is_some() {
            return Ok(StepStatus::Ended);
        }
        let sc = &self.scenario;
        let th = sc.thresholds;
        let order = &sc.order;

        let frames = edge_frames(&self.world.pursuers, order, self.world.evader)?;
        let detection = detect_active_edge(&self.areas, &frames, &th);
        let next_phase = self.phase.update(detection, &self.areas, &frames, &th, self.world.t);
        if next_phase.mode != self.phase.mode {
            debug!(t = self.world.t, from = ?self.phase.mode, to = ?next_phase.mode, "phase switch");
        }
        self.phase = next_phase;

        if let Some(i) = order.first_redundant(&self.world.pursuers) {
            self.redundancy_warnings += 1;
            if self.redundancy_warnings == 1 {
                warn!(t = self.world.t, pursuer = i, "pursuer became redundant; keeping fixed hull labels");
            }
        }
        if let Phase::Edge(edge) = self.phase.mode {
            let speeds = &sc.params.speeds;
            let check = encirclement_condition(
                speeds[edge.j],
                speeds[edge.k],
                &frames[edge.position],
                &sc.phi,
                sc.params.mu_max,
            );
            if !check.holds {
                self.condition_failures += 1;
            }
        }

        if self.record_trace {
            let rec = self.snapshot();
            self.records.push(rec);
        }

        let headings = self.strategy.headings(&self.world, order, &self.phase.mode)?;
        let evader = policy
            .control(&Observation {
                step: self.step_index,
                world: &self.world,
                order,
                thresholds: &th,
                mu_max: sc.params.mu_max,
            })
            .clamped(sc.params.mu_max);
        let input = ControlInput { pursuer_headings: headings, evader };
        let next = step(&self.world, &input, &sc.params.speeds, sc.dt);
        if !next.is_finite() {
            return Err(Error::NumericalDivergence { t: next.t });
        }

        let v_rate = (lyapunov_value(&next) - lyapunov_value(&self.world)) / sc.dt;
        self.max_v_rate = self.max_v_rate.max(v_rate);
        let capture = detect_capture(&self.world, &next, sc.params.capture_radius);

        self.world = next;
        self.step_index += 1;
        self.areas = area_vector(&self.world.pursuers, order, self.world.evader);
        self.min_area = self.min_area.min(self.areas.min());

        if capture.is_some() || self.world.t >= sc.t_max {
            self.finish(capture);
            return Ok(StepStatus::Ended);
        }
        Ok(StepStatus::Running)
    }

    fn finish(&mut self, capture: Option<Capture>) {
        if self.record_trace {
            let rec = self.snapshot();
            self.records.push(rec);
        }
        let t_capture = capture.map(|c| c.t);
        let tau = match (t_capture, self.t_bound) {
            (Some(t), Some(b)) if b > 0.0 => Some(t / b),
            _ => None,
        };
        let result = EpisodeResult {
            captured: capture.is_some(),
            t_capture,
            captured_by: capture.map(|c| c.pursuer + 1),
            t_end: self.world.t,
            steps: self.step_index,
            v0: self.v0,
            t_bound: self.t_bound,
            tau,
            min_area_seen: self.min_area,
            encirclement_ok: self.min_area >= -self.scenario.thresholds.eps_violation,
            max_lyapunov_rate: (self.step_index > 0).then_some(self.max_v_rate),
            redundancy_warnings: self.redundancy_warnings,
            condition_failures: self.condition_failures,
        };
        if !result.captured {
            warn!(t = self.world.t, t_max = self.scenario.t_max, "episode ended without capture");
        }
        if self.scenario.controller == ControllerMode::Capture && !(result.encirclement_ok && result.bound_respected())
        {
            warn!(?result, "capture certificate failed");
        }
        self.result = Some(result);
    }

    /// Ends the episode where it stands, without capture, unless it has
    /// already ended.
    pub fn stop(&mut self) -> &EpisodeResult {
        if self.result.is_none() {
            self.finish(None);
        }
        self.result.as_ref().expect("episode ended")
    }

    /// Runs to completion.
    pub fn run(&mut self, policy: &mut dyn EvaderPolicy) -> Result<&EpisodeResult> {
        while self.step(policy)? == StepStatus::Running {}
        Ok(self.result.as_ref().expect("episode ended"))
    }

    pub fn into_trace(self) -> Trace {
        Trace { order: self.scenario.order, records: self.records }
    }
}

/// Runs a full episode and returns the trace and the outcome.
pub fn run_episode(
    scenario: &Scenario,
    strategy: Box<dyn PursuerStrategy + Send + Sync>,
    policy: &mut dyn EvaderPolicy,
) -> Result<(Trace, EpisodeResult)> {
    let mut episode = Episode::with_strategy(scenario, strategy)?;
    let result = episode.run(policy)?.clone();
    Ok((episode.into_trace(), result))
}

/// Capture-time bound of a scenario's initial configuration.
pub(crate) fn bound_for(world: &WorldState, params: &AgentParams) -> Option<f64> {
    capture_time_bound(lyapunov_value(world), world.pursuers.len(), params.capture_radius, params.mu_max).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn world_at(t: f64, pursuers: &[(f64, f64)], e: (f64, f64)) -> WorldState {
        WorldState {
            t,
            pursuers: pursuers.iter().map(|&(x, y)| Vec2::new(x, y)).collect(),
            evader: Vec2::new(e.0, e.1),
        }
    }

    #[test]
    fn euler_step_examples() {
        let w = world_at(0.0, &[(0.0, 0.0)], (5.0, 5.0));
        let u =
            ControlInput { pursuer_headings: vec![Vec2::new(1.0, 0.0)], evader: EvaderControl { mu: 0.0, psi: 1.0 } };
        let next = step(&w, &u, &[1.0], 0.01);
        assert_eq!(next.pursuers[0], Vec2::new(0.01, 0.0));
        assert_eq!(next.evader, w.evader);
        assert_abs_diff_eq!(next.t, 0.01);

        let h = Vec2::from_angle(2.3);
        let u = ControlInput { pursuer_headings: vec![h], evader: EvaderControl { mu: 0.5, psi: -0.4 } };
        let next = step(&w, &u, &[1.0], 0.005);
        assert_abs_diff_eq!(next.pursuers[0].distance(w.pursuers[0]), 0.005, epsilon = 1e-15);
        assert_abs_diff_eq!(next.evader.distance(w.evader), 0.0025, epsilon = 1e-15);
    }

    #[test]
    fn capture_interpolation() {
        let prev = world_at(1.0, &[(0.31, 0.0), (5.0, 0.0)], (0.0, 0.0));
        let next = world_at(1.01, &[(0.29, 0.0), (5.0, 0.0)], (0.0, 0.0));
        let c = detect_capture(&prev, &next, 0.3).unwrap();
        assert_eq!(c.pursuer, 0);
        assert_abs_diff_eq!(c.t, 1.005, epsilon = 1e-12);

        let far = world_at(1.01, &[(0.31, 0.0), (5.0, 0.0)], (0.0, 0.0));
        assert_eq!(detect_capture(&prev, &far, 0.3), None);

        let prev = world_at(0.0, &[(0.0, 0.31), (0.31, 0.0)], (0.0, 0.0));
        let next = world_at(0.1, &[(0.0, 0.29), (0.29, 0.0)], (0.0, 0.0));
        assert_eq!(detect_capture(&prev, &next, 0.3).unwrap().pursuer, 0);

        // Earlier crossing wins over lower index.
        let next = world_at(0.1, &[(0.0, 0.29), (0.2, 0.0)], (0.0, 0.0));
        let c = detect_capture(&prev, &next, 0.3).unwrap();
        assert_eq!(c.pursuer, 1);
        assert_abs_diff_eq!(c.t, 0.01 / 0.11 * 0.1, epsilon = 1e-12);
    }

    #[test]
    fn hysteresis_keeps_edge_until_exit_threshold() {
        let th = Thresholds { eps_act: 0.001, eps_exit: 0.002, eps_violation: 0.005, lambda_tol: 1e-6 };
        let pursuers = vec![Vec2::new(0.0, 2.0), Vec2::new(-1.0, 0.0), Vec2::new(0.8, 0.0)];
        let order = crate::geometry::hull_order(&pursuers).unwrap();
        let frames = edge_frames(&pursuers, &order, Vec2::new(0.4, 1.0)).unwrap();
        let edge = order.edge(2);
        let areas = |a: f64| AreaVector { areas: vec![0.5, 0.9, a] };

        let s0 = PhaseState::interior(0.0);
        let s1 = s0.update(EdgeDetection::Edge(edge), &areas(0.0008), &frames, &th, 0.1);
        assert_eq!(s1.mode, Phase::Edge(edge));
        assert_eq!(s1.entered_at, 0.1);
        // Inside the band: no detection, but the phase holds.
        let s2 = s1.update(EdgeDetection::None, &areas(0.0015), &frames, &th, 0.2);
        assert_eq!(s2, s1);
        let s3 = s2.update(EdgeDetection::None, &areas(0.0021), &frames, &th, 0.3);
        assert_eq!(s3.mode, Phase::Interior);
        assert_eq!(s3.entered_at, 0.3);
        let v = s3.update(EdgeDetection::Violation(edge), &areas(-0.01), &frames, &th, 0.4);
        assert_eq!(v.mode, Phase::Edge(edge));
    }
}
