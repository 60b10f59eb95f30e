//! Certificates and diagnostics: the Lyapunov value, the capture-time bound
//! and the pursuer/evader split of the sub-triangle area rate.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evader::EvaderControl;
use crate::geometry::{Edge, EdgeFrame, Vec2};
use crate::pursuit::PhiSelection;
use crate::simulation::WorldState;

/// Sum of pursuer-evader distances.
pub fn lyapunov_value(world: &WorldState) -> f64 {
    world.distances().sum()
}

/// `(V0 - n r_c) / (n (1 - mu_max))`.
pub fn capture_time_bound(v0: f64, n: usize, capture_radius: f64, mu_max: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&mu_max) {
        return Err(Error::SpeedRatioOutOfRange(mu_max));
    }
    let floor = n as f64 * capture_radius;
    // Rounding slack for a configuration sitting exactly at the floor.
    if v0 < floor - 1e-12 * floor.max(1.0) {
        return Err(Error::InvalidState(format!("Lyapunov value {v0} is below the capture floor n*r_c = {floor}")));
    }
    Ok(((v0 - floor) / (n as f64 * (1.0 - mu_max))).max(0.0))
}

/// Pursuer and evader contributions to `2 dA_jk/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRates {
    pub t_p: f64,
    pub t_e: f64,
    pub a_dot: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Splits the rate of `A_jk` into the part due to pursuers `j, k` and the
/// part due to the evader.
///
/// `T_p = ṗ_jᵀ (e - p_k)⊥ + ṗ_kᵀ (p_j - e)⊥` and `T_e = -mu d_jk sin(α - ψ)`.
pub fn area_rate_decomposition(
    world: &WorldState,
    pursuer_velocities: &[Vec2],
    evader: EvaderControl,
    edge: Edge,
) -> Result<DiagnosticRates> {
    let pj = world.pursuers[edge.j];
    let pk = world.pursuers[edge.k];
    let e = world.evader;
    let d_jk = pj.distance(pk);
    if d_jk < 1e-12 {
        return Err(Error::DegenerateEdge { j: edge.j, k: edge.k });
    }
    let t_p = pursuer_velocities[edge.j].dot((e - pk).perp()) + pursuer_velocities[edge.k].dot((pj - e).perp());
    let alpha = (pk.y - pj.y).atan2(pk.x - pj.x);
    let t_e = -evader.mu * d_jk * (alpha - evader.psi).sin();
    Ok(DiagnosticRates {
        t_p,
        t_e,
        a_dot: 0.5 * (t_p + t_e),
        alpha,
        beta: (e.x - pk.x).atan2(pk.y - e.y),
        gamma: (pj.x - e.x).atan2(e.y - pj.y),
    })
}

/// Closed-form `2 dA_jk/dt` on an active edge under the edge-phase law:
/// `v_j d_ek sin φ_j + v_k d_ej sin φ_k - d_jk mu sin(α - ψ)`.
pub fn closed_loop_edge_rate(v_j: f64, v_k: f64, frame: &EdgeFrame, sel: &PhiSelection, evader: EvaderControl) -> f64 {
    v_j * frame.d_ek * sel.phi_j.sin() + v_k * frame.d_ej * sel.phi_k.sin()
        - frame.d_jk * evader.mu * (frame.alpha - evader.psi).sin()
}

/// Maps `(u, v)` in the unit square onto the triangle `a b c`, folding the
/// half with `u + v > 1` back so the result is uniform.
pub fn unit_square_to_triangle(u: f64, v: f64, a: Vec2, b: Vec2, c: Vec2) -> Vec2 {
    let (u, v) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
    a + (b - a) * u + (c - a) * v
}

/// Uniform sample from the triangle `a b c`.
pub fn sample_in_triangle<R: Rng + ?Sized>(rng: &mut R, a: Vec2, b: Vec2, c: Vec2) -> Vec2 {
    let u: f64 = rng.random();
    let v: f64 = rng.random();
    unit_square_to_triangle(u, v, a, b, c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{edge_frame, signed_area};
    use crate::pursuit::{edge_phase_headings, PhiRule};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn reference_world() -> WorldState {
        WorldState {
            t: 0.0,
            pursuers: vec![Vec2::new(0.0, 2.0), Vec2::new(-1.0, 0.0), Vec2::new(0.8, 0.0)],
            evader: Vec2::new(0.0, 1.0),
        }
    }

    #[test]
    fn lyapunov_examples() {
        let v = lyapunov_value(&reference_world());
        assert_abs_diff_eq!(v, 1.0 + 2f64.sqrt() + 1.64f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v, 3.69483, epsilon = 1e-5);

        let at_floor = WorldState {
            t: 0.0,
            pursuers: vec![Vec2::new(0.3, 0.0), Vec2::new(0.0, 0.3), Vec2::new(-0.3, 0.0)],
            evader: Vec2::ZERO,
        };
        assert_abs_diff_eq!(lyapunov_value(&at_floor), 0.9, epsilon = 1e-15);
    }

    #[test]
    fn capture_time_bound_examples() {
        let v0 = lyapunov_value(&reference_world());
        let greedy = capture_time_bound(v0, 3, 0.3, 0.7).unwrap();
        let still = capture_time_bound(v0, 3, 0.3, 0.0).unwrap();
        assert_abs_diff_eq!(greedy, (v0 - 0.9) / 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(still, (v0 - 0.9) / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(greedy, 3.105, epsilon = 5e-4);
        assert_abs_diff_eq!(still, 0.9316, epsilon = 5e-5);
        assert_abs_diff_eq!(capture_time_bound(0.9, 3, 0.3, 0.5).unwrap(), 0.0, epsilon = 1e-15);
        assert!(matches!(capture_time_bound(v0, 3, 0.3, 1.0), Err(Error::SpeedRatioOutOfRange(_))));
        assert!(matches!(capture_time_bound(0.5, 3, 0.3, 0.5), Err(Error::InvalidState(_))));
    }

    #[test]
    fn stationary_evader_contributes_nothing() {
        let w = reference_world();
        let vel = vec![Vec2::new(0.3, -0.2), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        let r =
            area_rate_decomposition(&w, &vel, EvaderControl { mu: 0.0, psi: 1.3 }, Edge { position: 0, j: 0, k: 1 })
                .unwrap();
        assert_eq!(r.t_e, 0.0);
        assert_abs_diff_eq!(2.0 * r.a_dot, r.t_p + r.t_e, epsilon = 1e-15);
    }

    #[test]
    fn edge_phase_pursuer_term_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let pj = Vec2::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let pk = pj + Vec2::from_angle(rng.random_range(0.0..std::f64::consts::TAU)) * rng.random_range(0.5..4.0);
            let lambda: f64 = rng.random_range(0.05..0.95);
            let e = pj + (pk - pj) * lambda;
            let edge = Edge { position: 0, j: 0, k: 1 };
            let frame = edge_frame(pj, pk, e, edge).unwrap();
            let phi = rng.random_range(0.0..std::f64::consts::PI);
            let sel = PhiSelection::resolve(PhiRule::Fixed { phi }, 0.0);
            let (dj, dk) = edge_phase_headings(&frame, &sel);
            let world = WorldState { t: 0.0, pursuers: vec![pj, pk], evader: e };
            let r = area_rate_decomposition(&world, &[dj, dk], EvaderControl::default(), edge).unwrap();
            assert_abs_diff_eq!(r.t_p, frame.d_ek * phi.sin() + frame.d_ej * phi.sin(), epsilon = 1e-9);
        }
    }

    #[test]
    fn compact_pursuer_form_agrees() {
        // T_p = d_ek v_j cos(θ_j - β) + d_ej v_k cos(θ_k - γ).
        let w = reference_world();
        let edge = Edge { position: 1, j: 1, k: 2 };
        let (tj, tk) = (0.4_f64, 2.2_f64);
        let vel = vec![Vec2::ZERO, Vec2::from_angle(tj), Vec2::from_angle(tk)];
        let r = area_rate_decomposition(&w, &vel, EvaderControl::default(), edge).unwrap();
        let d_ek = w.evader.distance(w.pursuers[2]);
        let d_ej = w.evader.distance(w.pursuers[1]);
        let compact = d_ek * (tj - r.beta).cos() + d_ej * (tk - r.gamma).cos();
        assert_abs_diff_eq!(r.t_p, compact, epsilon = 1e-12);
    }

    #[test]
    fn decomposition_matches_area_finite_difference() {
        let w = reference_world();
        let vel = vec![Vec2::from_angle(-1.0), Vec2::from_angle(0.6), Vec2::from_angle(2.1)];
        let ev = EvaderControl { mu: 0.7, psi: 2.5 };
        let edge = Edge { position: 2, j: 2, k: 0 };
        let r = area_rate_decomposition(&w, &vel, ev, edge).unwrap();
        let h = 1e-6;
        let at =
            |s: f64| signed_area(w.evader + ev.velocity() * s, w.pursuers[2] + vel[2] * s, w.pursuers[0] + vel[0] * s);
        let fd = (at(h) - at(-h)) / (2.0 * h);
        assert_abs_diff_eq!(r.a_dot, fd, epsilon = 1e-8);
    }

    #[test]
    fn triangle_sampler_examples() {
        let (a, b, c) = (Vec2::new(0.0, 2.0), Vec2::new(-1.0, 0.0), Vec2::new(0.8, 0.0));
        assert_eq!(unit_square_to_triangle(0.0, 0.0, a, b, c), a);
        let folded = unit_square_to_triangle(0.9, 0.9, a, b, c);
        let direct = unit_square_to_triangle(0.1, 0.1, a, b, c);
        assert_abs_diff_eq!(folded.x, direct.x, epsilon = 1e-15);
        assert_abs_diff_eq!(folded.y, direct.y, epsilon = 1e-15);
    }
}
