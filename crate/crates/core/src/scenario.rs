//! Scenario files.
//!
//! A scenario is a JSON object; lengths are meters, speeds meters per second,
//! times seconds and angles radians. Unknown fields are rejected.
//!
//! ```json
//! {
//!   "pursuers": [[0, 2], [-1, 0], [0.8, 0]],
//!   "evader": [0, 1],
//!   "mu_max": 0.7,
//!   "capture_radius": 0.3,
//!   "policy": { "kind": "closest_link" }
//! }
//! ```
//!
//! Optional fields: `pursuer_speeds` (default all 1), `controller`
//! (`"capture"` or `"encirclement"`), `phi` (`{"rule": "lower_bound"}`,
//! `{"rule": "fixed", "phi": ..}` or `{"rule": "custom", "phi_j": .., "phi_k": ..}`),
//! `dt` (0.005), `t_max`, `seed` (0) and `thresholds` (any of `eps_act`,
//! `eps_exit`, `eps_violation`, `lambda_tol`).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evader::{PolicyKind, PolicySpec};
use crate::geometry::{area_vector, hull_order, HullOrder, Thresholds, Vec2};
use crate::pursuit::{capture_phi_range, encirclement_phi_range, PhiRule, PhiSelection};
use crate::simulation::{bound_for, AgentParams, WorldState};

pub const DEFAULT_DT: f64 = 0.005;

/// Which guarantee the pursuers are configured for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerMode {
    /// Unit-speed pursuers, `mu_max < 1`, angles in the capture range:
    /// encirclement plus finite-time capture within the analytic bound.
    #[default]
    Capture,
    /// Encirclement only: angles in the wider range, any pursuer speeds.
    Encirclement,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_act: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_exit: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_violation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_tol: Option<f64>,
}

/// Scenario as written in a file, before defaults and validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub pursuers: Vec<Vec2>,
    pub evader: Vec2,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pursuer_speeds: Option<Vec<f64>>,
    pub mu_max: f64,
    pub capture_radius: f64,
    #[serde(default)]
    pub controller: ControllerMode,
    #[serde(default)]
    pub phi: PhiRule,
    #[serde(default)]
    pub policy: PolicySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub thresholds: ThresholdOverrides,
}

impl ScenarioConfig {
    /// Three pursuers at (0,2), (-1,0), (0.8,0) around an evader at (0,1),
    /// `r_c = 0.3`, `mu_max = 0.7`.
    pub fn table1() -> Self {
        Self {
            pursuers: vec![Vec2::new(0.0, 2.0), Vec2::new(-1.0, 0.0), Vec2::new(0.8, 0.0)],
            evader: Vec2::new(0.0, 1.0),
            pursuer_speeds: None,
            mu_max: 0.7,
            capture_radius: 0.3,
            controller: ControllerMode::Capture,
            phi: PhiRule::LowerBound,
            policy: PolicySpec::new(PolicyKind::Greedy),
            dt: None,
            t_max: None,
            seed: 0,
            thresholds: ThresholdOverrides::default(),
        }
    }

    pub fn with_policy(mut self, kind: PolicyKind) -> Self {
        self.policy.kind = kind;
        self
    }

    pub fn with_mu_max(mut self, mu_max: f64) -> Self {
        self.mu_max = mu_max;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_evader(mut self, evader: Vec2) -> Self {
        self.evader = evader;
        self
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Fills defaults and checks every invariant.
    pub fn validate(&self) -> Result<Scenario> {
        let invalid = |msg: String| Err(Error::Validation(msg));
        let n = self.pursuers.len();
        if n < 3 {
            return invalid(format!("at least 3 pursuers required, got {n}"));
        }
        if !self.evader.is_finite() || self.pursuers.iter().any(|p| !p.is_finite()) {
            return invalid("positions must be finite".into());
        }
        let order = hull_order(&self.pursuers).map_err(|e| Error::Validation(e.to_string()))?;

        let speeds = self.pursuer_speeds.clone().unwrap_or_else(|| vec![1.0; n]);
        if speeds.len() != n {
            return invalid(format!("pursuer_speeds has {} entries for {n} pursuers", speeds.len()));
        }
        if let Some(v) = speeds.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return invalid(format!("pursuer speeds must be > 0, got {v}"));
        }
        if !(self.mu_max >= 0.0 && self.mu_max.is_finite()) {
            return invalid(format!("mu_max must be >= 0, got {}", self.mu_max));
        }
        if !(self.capture_radius > 0.0 && self.capture_radius.is_finite()) {
            return invalid(format!("capture_radius must be > 0, got {}", self.capture_radius));
        }
        let dt = self.dt.unwrap_or(DEFAULT_DT);
        if !(dt > 0.0 && dt.is_finite()) {
            return invalid(format!("dt must be > 0, got {dt}"));
        }
        self.policy.validate().map_err(Error::Validation)?;

        let phi = PhiSelection::resolve(self.phi, self.mu_max);
        let unit_speeds = speeds.iter().all(|&v| v == 1.0);
        match self.controller {
            ControllerMode::Capture => {
                if !unit_speeds {
                    return invalid("capture mode requires all pursuer speeds equal to 1".into());
                }
                let range = capture_phi_range(self.mu_max)
                    .map_err(|_| Error::Validation(format!("capture mode requires mu_max < 1, got {}", self.mu_max)))?;
                if !phi.within(range) {
                    return invalid(format!(
                        "phi ({}, {}) outside the capture range [{}, {}]",
                        phi.phi_j, phi.phi_k, range.lo, range.hi
                    ));
                }
            }
            ControllerMode::Encirclement => {
                if unit_speeds {
                    let range = encirclement_phi_range(self.mu_max).map_err(|_| {
                        Error::Validation(format!("unit-speed pursuers require mu_max <= 1, got {}", self.mu_max))
                    })?;
                    if !phi.within(range) {
                        return invalid(format!(
                            "phi ({}, {}) outside the encirclement range [{}, {}]",
                            phi.phi_j, phi.phi_k, range.lo, range.hi
                        ));
                    }
                } else if !(phi.phi_j > 0.0 && phi.phi_j < std::f64::consts::PI)
                    || !(phi.phi_k > 0.0 && phi.phi_k < std::f64::consts::PI)
                {
                    return invalid("phi must lie in (0, pi)".into());
                }
            }
        }

        let areas = area_vector(&self.pursuers, &order, self.evader);
        if areas.min() <= 0.0 {
            return invalid(format!(
                "evader {} is not strictly inside the pursuers' hull (min sub-area {:.3e})",
                self.evader,
                areas.min()
            ));
        }
        let d_min = self.pursuers.iter().map(|p| p.distance(self.evader)).fold(f64::INFINITY, f64::min);
        if d_min <= self.capture_radius {
            return invalid(format!("evader starts captured (d_min = {d_min} <= r_c)"));
        }

        let base = Thresholds::for_hull_area(order.area(&self.pursuers));
        let o = self.thresholds;
        let eps_act = o.eps_act.unwrap_or(base.eps_act);
        let thresholds = Thresholds {
            eps_act,
            eps_exit: o.eps_exit.unwrap_or(2.0 * eps_act),
            eps_violation: o.eps_violation.unwrap_or(5.0 * eps_act),
            lambda_tol: o.lambda_tol.unwrap_or(base.lambda_tol),
        };
        if !(thresholds.eps_act > 0.0
            && thresholds.eps_exit >= thresholds.eps_act
            && thresholds.eps_violation > thresholds.eps_act
            && thresholds.lambda_tol >= 0.0)
        {
            return invalid(format!(
                "thresholds must satisfy 0 < eps_act <= eps_exit and eps_act < eps_violation, got {thresholds:?}"
            ));
        }

        let params = AgentParams { speeds, mu_max: self.mu_max, capture_radius: self.capture_radius };
        let mut scenario = Scenario {
            pursuer_starts: self.pursuers.clone(),
            evader_start: self.evader,
            params,
            controller: self.controller,
            phi,
            policy: self.policy,
            dt,
            t_max: 0.0,
            seed: self.seed,
            thresholds,
            order,
        };
        scenario.t_max = match self.t_max {
            Some(t) if t > 0.0 && t.is_finite() => t,
            Some(t) => return invalid(format!("t_max must be > 0, got {t}")),
            None => scenario.default_t_max(),
        };
        Ok(scenario)
    }
}

/// A validated scenario with all defaults resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub pursuer_starts: Vec<Vec2>,
    pub evader_start: Vec2,
    pub params: AgentParams,
    pub controller: ControllerMode,
    pub phi: PhiSelection,
    pub policy: PolicySpec,
    pub dt: f64,
    pub t_max: f64,
    pub seed: u64,
    pub thresholds: Thresholds,
    /// Counterclockwise hull labels fixed at t = 0.
    pub order: HullOrder,
}

impl Scenario {
    pub fn table1() -> Self {
        ScenarioConfig::table1().validate().expect("built-in scenario is valid")
    }

    pub fn n(&self) -> usize {
        self.pursuer_starts.len()
    }

    pub fn initial_world(&self) -> WorldState {
        WorldState { t: 0.0, pursuers: self.pursuer_starts.clone(), evader: self.evader_start }
    }

    /// Analytic capture-time bound from the initial configuration; `None`
    /// outside capture mode.
    pub fn t_bound(&self) -> Option<f64> {
        match self.controller {
            ControllerMode::Capture => bound_for(&self.initial_world(), &self.params),
            ControllerMode::Encirclement => None,
        }
    }

    /// Ten times the bound, or 100 s when the speed ratio is within 1% of
    /// one or there is no bound.
    pub fn default_t_max(&self) -> f64 {
        match self.t_bound() {
            Some(b) if self.params.mu_max < 0.99 => (10.0 * b).max(10.0 * self.dt),
            _ => 100.0,
        }
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    load_config(path)?.validate()
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    ScenarioConfig::from_json(&text).map_err(|source| Error::Parse { path: path.to_path_buf(), source })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_defaults() {
        let s = Scenario::table1();
        assert_eq!(s.order.indices(), &[0, 1, 2]);
        assert_eq!(s.dt, 0.005);
        assert_abs_diff_eq!(s.phi.phi_j, 0.7f64.asin());
        assert_abs_diff_eq!(s.thresholds.eps_act, 1.8e-3, epsilon = 1e-15);
        assert_abs_diff_eq!(s.thresholds.eps_exit, 3.6e-3, epsilon = 1e-15);
        assert_abs_diff_eq!(s.thresholds.eps_violation, 9e-3, epsilon = 1e-15);
        let v0 = 1.0 + 2f64.sqrt() + 1.64f64.sqrt();
        assert_abs_diff_eq!(s.t_bound().unwrap(), (v0 - 0.9) / 0.9, epsilon = 1e-12);
        assert_abs_diff_eq!(s.t_max, 10.0 * (v0 - 0.9) / 0.9, epsilon = 1e-12);
    }

    #[test]
    fn parses_minimal_json() {
        let cfg = ScenarioConfig::from_json(
            r#"{"pursuers": [[0, 2], [-1, 0], [0.8, 0]], "evader": [0, 1],
                "mu_max": 0.7, "capture_radius": 0.3, "policy": {"kind": "closest_link"}}"#,
        )
        .unwrap();
        assert_eq!(cfg.policy.kind, PolicyKind::ClosestLink);
        assert_eq!(cfg.policy.period, 0.3);
        let s = cfg.validate().unwrap();
        assert_eq!(s.pursuer_starts[2], Vec2::new(0.8, 0.0));
    }

    #[test]
    fn rejects_unknown_fields() {
        let err = ScenarioConfig::from_json(
            r#"{"pursuers": [[0, 2], [-1, 0], [0.8, 0]], "evader": [0, 1],
                "mu_max": 0.7, "capture_radius": 0.3, "capture_raduis": 0.2}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("capture_raduis"));
    }

    #[test]
    fn validation_errors() {
        let fails = |cfg: ScenarioConfig| matches!(cfg.validate(), Err(Error::Validation(_)));
        assert!(fails(ScenarioConfig::table1().with_mu_max(1.2)));
        assert!(fails(ScenarioConfig::table1().with_mu_max(1.0)));
        assert!(fails(ScenarioConfig::table1().with_evader(Vec2::new(2.0, 2.0))));
        assert!(fails(ScenarioConfig::table1().with_evader(Vec2::new(0.4, 1.0))));
        assert!(fails(ScenarioConfig::table1().with_evader(Vec2::new(0.0, 1.8))));
        assert!(fails(ScenarioConfig::table1().with_dt(0.0)));
        let mut cfg = ScenarioConfig::table1();
        cfg.phi = PhiRule::Fixed { phi: 1.5 };
        assert!(fails(cfg.clone()));
        cfg.controller = ControllerMode::Encirclement;
        assert!(cfg.validate().is_ok());
        let mut cfg = ScenarioConfig::table1();
        cfg.pursuer_speeds = Some(vec![1.0, 1.2, 1.0]);
        assert!(fails(cfg.clone()));
        cfg.controller = ControllerMode::Encirclement;
        assert!(cfg.validate().is_ok());
        let mut cfg = ScenarioConfig::table1();
        cfg.pursuers.push(Vec2::new(0.0, 0.5));
        assert!(fails(cfg));
    }

    #[test]
    fn encirclement_mode_has_no_bound() {
        let mut cfg = ScenarioConfig::table1().with_mu_max(1.0);
        cfg.controller = ControllerMode::Encirclement;
        let s = cfg.validate().unwrap();
        assert_eq!(s.t_bound(), None);
        assert_eq!(s.t_max, 100.0);
        assert_abs_diff_eq!(s.phi.phi_j, std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn threshold_overrides() {
        let mut cfg = ScenarioConfig::table1();
        cfg.thresholds.eps_act = Some(0.01);
        let s = cfg.validate().unwrap();
        assert_abs_diff_eq!(s.thresholds.eps_exit, 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(s.thresholds.eps_violation, 0.05, epsilon = 1e-15);
        cfg.thresholds.eps_violation = Some(0.005);
        assert!(cfg.validate().is_err());
    }
}
