//! Pursuer control laws.
//!
//! Headings are carried as unit vectors; an angle is only produced at the
//! trace and protocol boundary.

use std::f64::consts::FRAC_PI_2;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{edge_frame, rotate_ccw, rotate_cw, EdgeFrame, HullOrder, Vec2};
use crate::simulation::{Phase, WorldState};

/// Unit vector from `p` towards `e`.
pub fn pure_pursuit_heading(p: Vec2, e: Vec2) -> Result<Vec2> {
    (e - p).normalized(1e-12).ok_or(Error::ZeroDistance)
}

/// How the two active pursuers pick their outward rotation angles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiRule {
    /// Both angles at `asin(mu_max)`, the smallest admissible rotation.
    #[default]
    LowerBound,
    /// Both angles at the given value (radians).
    Fixed { phi: f64 },
    /// Distinct angles for the `j` (clockwise-side) and `k` pursuer.
    Custom { phi_j: f64, phi_k: f64 },
}

/// Resolved rotation angles for the active pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiSelection {
    pub phi_j: f64,
    pub phi_k: f64,
    pub rule: PhiRule,
}

impl PhiSelection {
    pub fn resolve(rule: PhiRule, mu_max: f64) -> Self {
        let (phi_j, phi_k) = match rule {
            PhiRule::LowerBound => {
                let phi = mu_max.clamp(0.0, 1.0).asin();
                (phi, phi)
            }
            PhiRule::Fixed { phi } => (phi, phi),
            PhiRule::Custom { phi_j, phi_k } => (phi_j, phi_k),
        };
        Self { phi_j, phi_k, rule }
    }

    pub fn symmetric(phi: f64) -> Self {
        Self::resolve(PhiRule::Fixed { phi }, 0.0)
    }

    /// Both angles inside `range`, with a small slack for rounding of the
    /// closed-form endpoints.
    pub fn within(&self, range: PhiRange) -> bool {
        range.contains(self.phi_j) && range.contains(self.phi_k)
    }
}

/// Closed interval of admissible rotation angles (radians).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiRange {
    pub lo: f64,
    pub hi: f64,
}

impl PhiRange {
    pub fn contains(&self, phi: f64) -> bool {
        const SLACK: f64 = 1e-12;
        phi >= self.lo - SLACK && phi <= self.hi + SLACK
    }
}

/// Angles that keep the evader encircled for unit-speed pursuers:
/// `[asin(mu_max), π - asin(mu_max)]`.
pub fn encirclement_phi_range(mu_max: f64) -> Result<PhiRange> {
    if !(0.0..=1.0).contains(&mu_max) {
        return Err(Error::SpeedRatioOutOfRange(mu_max));
    }
    let lo = mu_max.asin();
    Ok(PhiRange { lo, hi: PI - lo })
}

/// Angles that additionally keep the Lyapunov decay rate at `n(1 - mu_max)`:
/// `[asin(mu_max), π/2 - asin(1 - mu_max)]`.
pub fn capture_phi_range(mu_max: f64) -> Result<PhiRange> {
    if !(0.0..1.0).contains(&mu_max) {
        return Err(Error::SpeedRatioOutOfRange(mu_max));
    }
    Ok(PhiRange { lo: mu_max.asin(), hi: FRAC_PI_2 - (1.0 - mu_max).asin() })
}

/// Edge-phase headings for the active pair `(j, k)`.
///
/// On the edge `e - p_j` is parallel to `u_jk` and `e - p_k` to `-u_jk`, so
/// the rotated pursuit directions reduce to `(cos(α-φ_j), sin(α-φ_j))` and
/// `-(cos(α+φ_k), sin(α+φ_k))`. The frame form is used so that the outward
/// normal speed of each endpoint is exactly `sin φ` inside the hysteresis
/// band too.
pub fn edge_phase_headings(frame: &EdgeFrame, sel: &PhiSelection) -> (Vec2, Vec2) {
    let dir_j = rotate_cw(frame.u_jk, sel.phi_j);
    let dir_k = -rotate_ccw(frame.u_jk, sel.phi_k);
    (dir_j, dir_k)
}

/// Outcome of the encirclement inequality on an active edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub holds: bool,
    /// `v_j d_ek sin φ_j + v_k d_ej sin φ_k - d_jk mu_max` (m²/s).
    pub margin: f64,
}

pub fn encirclement_condition(
    v_j: f64,
    v_k: f64,
    frame: &EdgeFrame,
    sel: &PhiSelection,
    mu_max: f64,
) -> ConditionCheck {
    let margin = v_j * frame.d_ek * sel.phi_j.sin() + v_k * frame.d_ej * sel.phi_k.sin() - frame.d_jk * mu_max;
    ConditionCheck { holds: margin >= 0.0, margin }
}

/// Switched pursuit: pure pursuit for everyone in the interior phase; on an
/// active edge its two pursuers use the rotated law and the rest keep
/// pursuing.
pub fn switched_controller(world: &WorldState, phase: &Phase, sel: &PhiSelection) -> Result<Vec<Vec2>> {
    let mut headings =
        world.pursuers.iter().map(|&p| pure_pursuit_heading(p, world.evader)).collect::<Result<Vec<_>>>()?;
    if let Phase::Edge(edge) = phase {
        let frame = edge_frame(world.pursuers[edge.j], world.pursuers[edge.k], world.evader, *edge)?;
        let (dir_j, dir_k) = edge_phase_headings(&frame, sel);
        headings[edge.j] = dir_j;
        headings[edge.k] = dir_k;
    }
    Ok(headings)
}

/// Anything that maps the observed world and current phase to pursuer
/// headings (unit vectors, one per pursuer).
pub trait PursuerStrategy {
    fn headings(&self, world: &WorldState, order: &HullOrder, phase: &Phase) -> Result<Vec<Vec2>>;
}

/// The switched encirclement-preserving strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchedPursuit {
    pub selection: PhiSelection,
}

impl PursuerStrategy for SwitchedPursuit {
    fn headings(&self, world: &WorldState, _order: &HullOrder, phase: &Phase) -> Result<Vec<Vec2>> {
        switched_controller(world, phase, &self.selection)
    }
}

/// Pure pursuit regardless of phase. Kept as a baseline: it captures, but
/// nothing stops the evader from slipping through an edge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PurePursuit;

impl PursuerStrategy for PurePursuit {
    fn headings(&self, world: &WorldState, _order: &HullOrder, _phase: &Phase) -> Result<Vec<Vec2>> {
        switched_controller(world, &Phase::Interior, &PhiSelection::symmetric(0.0))
    }
}
