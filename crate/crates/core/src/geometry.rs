//! Planar primitives for the encirclement certificate.
//!
//! The hull formed by the pursuers is triangulated by joining the evader to
//! every pair of consecutive hull vertices. Each sub-triangle `(e, p_j, p_k)`
//! carries a signed area that is positive while the evader is strictly
//! inside, zero on the edge `p_j p_k`, and negative once it has crossed it.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point or displacement in the plane (meters, or meters per second for
/// velocities). Serialized as a two-element array `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector at angle `theta` from the +x axis.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// `v⊥ = (-v_y, v_x)`, a counterclockwise quarter turn.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Returns `None` when the norm is below `min_norm`.
    pub fn normalized(self, min_norm: f64) -> Option<Vec2> {
        let n = self.norm();
        (n >= min_norm).then(|| Vec2::new(self.x / n, self.y / n))
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Signed area of the triangle `(e, p_j, p_k)`: positive when the three
/// vertices are listed counterclockwise.
pub fn signed_area(e: Vec2, pj: Vec2, pk: Vec2) -> f64 {
    0.5 * (e.x * (pj.y - pk.y) + pj.x * (pk.y - e.y) + pk.x * (e.y - pj.y))
}

/// Shoelace area of a closed polygon given in traversal order.
pub fn polygon_area(vertices: impl IntoIterator<Item = Vec2>) -> f64 {
    let pts: Vec<Vec2> = vertices.into_iter().collect();
    if pts.len() < 3 {
        return 0.0;
    }
    let twice: f64 = pts.iter().zip(pts.iter().cycle().skip(1)).map(|(a, b)| a.cross(*b)).sum();
    0.5 * twice
}

/// Counterclockwise cyclic ordering of pursuer indices around their hull.
///
/// Indices are 0-based positions into the pursuer list. The sequence starts
/// at the lowest index so that already-ordered inputs map to `[0, 1, .., n-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullOrder {
    indices: Vec<usize>,
}

/// A hull edge `p_j p_k`, identified by its position in the hull order and
/// the two pursuer indices (counterclockwise, `k` follows `j`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub position: usize,
    pub j: usize,
    pub k: usize,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}p{}", self.j + 1, self.k + 1)
    }
}

impl HullOrder {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Edges in hull order: `(i_0, i_1), (i_1, i_2), .., (i_{n-1}, i_0)`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n = self.indices.len();
        (0..n).map(move |position| Edge { position, j: self.indices[position], k: self.indices[(position + 1) % n] })
    }

    pub fn edge(&self, position: usize) -> Edge {
        let n = self.indices.len();
        Edge { position, j: self.indices[position % n], k: self.indices[(position + 1) % n] }
    }

    /// Position of the edge `(j, k)`, if it is a hull edge.
    pub fn edge_position(&self, j: usize, k: usize) -> Option<usize> {
        self.edges().find(|e| e.j == j && e.k == k).map(|e| e.position)
    }

    /// Re-checks that the fixed cyclic labels still describe a strictly convex
    /// counterclockwise polygon. Returns the first pursuer whose vertex has
    /// become reflex or flat, i.e. redundant under the current positions.
    pub fn first_redundant(&self, points: &[Vec2]) -> Option<usize> {
        let n = self.indices.len();
        (0..n).find_map(|i| {
            let prev = points[self.indices[(i + n - 1) % n]];
            let cur = points[self.indices[i]];
            let next = points[self.indices[(i + 1) % n]];
            ((cur - prev).cross(next - cur) <= 0.0).then_some(self.indices[i])
        })
    }

    pub fn area(&self, points: &[Vec2]) -> f64 {
        polygon_area(self.indices.iter().map(|&i| points[i]))
    }
}

/// Orders `points` counterclockwise around their convex hull.
///
/// Every point must be a strict hull vertex: a point inside the hull of the
/// others, on one of its edges, or duplicating another point is reported as
/// [`Error::RedundantPursuer`].
pub fn hull_order(points: &[Vec2]) -> Result<HullOrder> {
    let n = points.len();
    if n < 3 {
        return Err(Error::Validation(format!("at least 3 pursuers required, got {n}")));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::Validation(format!("pursuer {i} has a non-finite position")));
    }

    let origin = points[0];
    let far = points.iter().copied().max_by(|a, b| a.distance(origin).total_cmp(&b.distance(origin))).unwrap_or(origin);
    let scale = far.distance(origin);
    let tol = 1e-12 * scale * scale;
    let dir = far - origin;
    if scale == 0.0 || points.iter().all(|p| dir.cross(*p - origin).abs() <= tol) {
        return Err(Error::DegenerateHull);
    }

    // Andrew's monotone chain, keeping strict turns only.
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_by(|&a, &b| {
        points[a].x.total_cmp(&points[b].x).then(points[a].y.total_cmp(&points[b].y)).then(a.cmp(&b))
    });
    let turn = |o: usize, a: usize, b: usize| (points[a] - points[o]).cross(points[b] - points[o]);
    let mut hull: Vec<usize> = Vec::with_capacity(2 * n);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> =
            if pass == 0 { Box::new(sorted.iter()) } else { Box::new(sorted.iter().rev()) };
        for &i in iter {
            while hull.len() >= start + 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], i) <= tol {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }

    if hull.len() < n {
        let redundant = (0..n).find(|i| !hull.contains(i)).unwrap_or(0);
        return Err(Error::RedundantPursuer(redundant));
    }

    let start = hull.iter().enumerate().min_by_key(|(_, &i)| i).map(|(pos, _)| pos).unwrap_or(0);
    hull.rotate_left(start);
    Ok(HullOrder { indices: hull })
}

/// One signed sub-triangle area per hull edge, in hull-edge order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaVector {
    pub areas: Vec<f64>,
}

impl AreaVector {
    pub fn min(&self) -> f64 {
        self.areas.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sum(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn get(&self, position: usize) -> f64 {
        self.areas[position]
    }
}

pub fn area_vector(pursuers: &[Vec2], order: &HullOrder, evader: Vec2) -> AreaVector {
    AreaVector { areas: order.edges().map(|edge| signed_area(evader, pursuers[edge.j], pursuers[edge.k])).collect() }
}

/// Per-edge quantities used by the edge-phase law and the area-rate formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeFrame {
    pub edge: Edge,
    /// Unit vector from `p_j` towards `p_k`.
    pub u_jk: Vec2,
    /// Direction of `u_jk`, full-quadrant.
    pub alpha: f64,
    pub d_ej: f64,
    pub d_ek: f64,
    pub d_jk: f64,
    /// Fraction of the way from `p_j` to `p_k` of the evader's projection onto
    /// the edge line. The evader is on the segment iff it is collinear and
    /// `lambda ∈ [0, 1]`.
    pub lambda: f64,
}

pub fn edge_frame(pj: Vec2, pk: Vec2, evader: Vec2, edge: Edge) -> Result<EdgeFrame> {
    let along = pk - pj;
    let d_jk = along.norm();
    if d_jk < 1e-12 {
        return Err(Error::DegenerateEdge { j: edge.j, k: edge.k });
    }
    let u_jk = along * (1.0 / d_jk);
    Ok(EdgeFrame {
        edge,
        u_jk,
        alpha: u_jk.y.atan2(u_jk.x),
        d_ej: evader.distance(pj),
        d_ek: evader.distance(pk),
        d_jk,
        lambda: (evader - pj).dot(u_jk) / d_jk,
    })
}

pub fn edge_frames(pursuers: &[Vec2], order: &HullOrder, evader: Vec2) -> Result<Vec<EdgeFrame>> {
    order.edges().map(|edge| edge_frame(pursuers[edge.j], pursuers[edge.k], evader, edge)).collect()
}

/// Thresholds for the discrete treatment of the `A_jk = 0` switching surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    /// Enter the edge phase at `A_jk <= eps_act` (m²).
    pub eps_act: f64,
    /// Leave the edge phase at `A_jk >= eps_exit` (m²).
    pub eps_exit: f64,
    /// `A_jk < -eps_violation` counts as a broken encirclement (m²).
    pub eps_violation: f64,
    /// Slack on `lambda ∈ [0, 1]` for the on-segment test.
    pub lambda_tol: f64,
}

impl Thresholds {
    pub const DEFAULT_LAMBDA_TOL: f64 = 1e-6;

    /// Scale-free defaults derived from the initial hull area.
    pub fn for_hull_area(hull_area: f64) -> Self {
        let eps_act = 1e-3 * hull_area;
        Self { eps_act, eps_exit: 2.0 * eps_act, eps_violation: 5.0 * eps_act, lambda_tol: Self::DEFAULT_LAMBDA_TOL }
    }

    pub fn lambda_in_range(&self, lambda: f64) -> bool {
        (-self.lambda_tol..=1.0 + self.lambda_tol).contains(&lambda)
    }
}

/// Result of scanning the sub-triangle areas for an active edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeDetection {
    None,
    Edge(Edge),
    Violation(Edge),
}

/// Finds the active edge, if any.
///
/// A violation (some `A_jk < -eps_violation`) takes precedence and reports the
/// most negative edge. Otherwise the smallest area at or below `eps_act`
/// whose projection parameter lies on the segment wins. Ties go to the lowest
/// position in hull order.
pub fn detect_active_edge(areas: &AreaVector, frames: &[EdgeFrame], thresholds: &Thresholds) -> EdgeDetection {
    debug_assert!(thresholds.eps_violation > thresholds.eps_act && thresholds.eps_act > 0.0);
    debug_assert_eq!(areas.areas.len(), frames.len());

    let argmin = |pred: &dyn Fn(usize) -> bool| {
        (0..frames.len()).filter(|&i| pred(i)).fold(None::<usize>, |best, i| match best {
            Some(b) if areas.areas[b] <= areas.areas[i] => Some(b),
            _ => Some(i),
        })
    };

    if let Some(i) = argmin(&|i| areas.areas[i] < -thresholds.eps_violation) {
        return EdgeDetection::Violation(frames[i].edge);
    }
    match argmin(&|i| areas.areas[i] <= thresholds.eps_act && thresholds.lambda_in_range(frames[i].lambda)) {
        Some(i) => EdgeDetection::Edge(frames[i].edge),
        None => EdgeDetection::None,
    }
}

/// `R_φ v` with `R_φ = [cos φ, sin φ; -sin φ, cos φ]`: a clockwise turn by φ.
pub fn rotate_cw(v: Vec2, phi: f64) -> Vec2 {
    let (s, c) = phi.sin_cos();
    Vec2::new(c * v.x + s * v.y, -s * v.x + c * v.y)
}

/// `R_φᵀ v`: a counterclockwise turn by φ.
pub fn rotate_ccw(v: Vec2, phi: f64) -> Vec2 {
    let (s, c) = phi.sin_cos();
    Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

/// Closest point to `p` on the segment `a b` (endpoint-clamped).
pub fn closest_point_on_segment(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return a;
    }
    let s = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    a + ab * s
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    theta.rem_euclid(2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn table1() -> Vec<Vec2> {
        vec![Vec2::new(0.0, 2.0), Vec2::new(-1.0, 0.0), Vec2::new(0.8, 0.0)]
    }

    #[test]
    fn signed_area_examples() {
        let e = Vec2::new(0.0, 1.0);
        let pj = Vec2::new(0.0, 2.0);
        let pk = Vec2::new(-1.0, 0.0);
        assert_abs_diff_eq!(signed_area(e, pj, pk), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(signed_area(e, pk, pj), -0.5, epsilon = 1e-15);
        let on_edge = signed_area(Vec2::new(0.4, 1.0), Vec2::new(0.8, 0.0), Vec2::new(0.0, 2.0));
        assert_abs_diff_eq!(on_edge, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hull_order_examples() {
        assert_eq!(hull_order(&table1()).unwrap().indices(), &[0, 1, 2]);
        let swapped = [Vec2::new(0.0, 2.0), Vec2::new(0.8, 0.0), Vec2::new(-1.0, 0.0)];
        assert_eq!(hull_order(&swapped).unwrap().indices(), &[0, 2, 1]);

        let mut pts = table1();
        pts.push(Vec2::new(-0.2 / 3.0, 2.0 / 3.0));
        assert!(matches!(hull_order(&pts), Err(Error::RedundantPursuer(3))));

        let line = [Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(3.0, 3.0)];
        assert!(matches!(hull_order(&line), Err(Error::DegenerateHull)));
        let same = [Vec2::new(1.0, 1.0); 3];
        assert!(matches!(hull_order(&same), Err(Error::DegenerateHull)));
    }

    #[test]
    fn point_on_hull_edge_is_redundant() {
        let pts = [Vec2::new(0.0, 0.0), Vec2::new(2.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 2.0)];
        assert!(matches!(hull_order(&pts), Err(Error::RedundantPursuer(2))));
    }

    #[test]
    fn hull_order_of_a_shuffled_square() {
        let pts = [Vec2::new(1.0, 1.0), Vec2::new(-1.0, -1.0), Vec2::new(1.0, -1.0), Vec2::new(-1.0, 1.0)];
        let order = hull_order(&pts).unwrap();
        assert_eq!(order.indices(), &[0, 3, 1, 2]);
        assert_abs_diff_eq!(order.area(&pts), 4.0, epsilon = 1e-12);
        assert_eq!(order.first_redundant(&pts), None);
    }

    #[test]
    fn area_vector_examples() {
        let pts = table1();
        let order = hull_order(&pts).unwrap();
        let a = area_vector(&pts, &order, Vec2::new(0.0, 1.0));
        assert_abs_diff_eq!(a.areas[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(a.areas[1], 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(a.areas[2], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(a.sum(), 1.8, epsilon = 1e-12);
        assert_abs_diff_eq!(order.area(&pts), 1.8, epsilon = 1e-12);

        let on_edge = area_vector(&pts, &order, Vec2::new(0.4, 1.0));
        assert_abs_diff_eq!(on_edge.areas[2], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn edge_frame_examples() {
        let edge = Edge { position: 2, j: 2, k: 0 };
        let f = edge_frame(Vec2::new(0.8, 0.0), Vec2::new(0.0, 2.0), Vec2::new(0.4, 1.0), edge).unwrap();
        assert_abs_diff_eq!(f.u_jk.x, -0.371390676, epsilon = 1e-9);
        assert_abs_diff_eq!(f.u_jk.y, 0.928476691, epsilon = 1e-9);
        assert_abs_diff_eq!(f.alpha, 1.951302703, epsilon = 1e-9);
        assert_abs_diff_eq!(f.d_ej, 1.077032961, epsilon = 1e-9);
        assert_abs_diff_eq!(f.d_ek, 1.077032961, epsilon = 1e-9);
        assert_abs_diff_eq!(f.d_jk, 2.154065923, epsilon = 1e-9);
        assert_abs_diff_eq!(f.lambda, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(f.d_ej + f.d_ek, f.d_jk, epsilon = 1e-9 * f.d_jk);

        let edge = Edge { position: 0, j: 0, k: 1 };
        let f = edge_frame(Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(0.25, 0.0), edge).unwrap();
        assert_eq!(f.alpha, 0.0);
        assert_abs_diff_eq!(f.lambda, 0.25);
        assert_abs_diff_eq!(f.d_ej, 0.25);
        assert_abs_diff_eq!(f.d_ek, 0.75);

        let f = edge_frame(Vec2::ZERO, Vec2::new(1.0, 0.0), Vec2::new(2.0, 0.0), edge).unwrap();
        assert_abs_diff_eq!(f.lambda, 2.0);

        assert!(matches!(
            edge_frame(Vec2::ZERO, Vec2::new(1e-13, 0.0), Vec2::new(1.0, 1.0), edge),
            Err(Error::DegenerateEdge { j: 0, k: 1 })
        ));
    }

    fn frames_with_lambda(lambda: f64) -> Vec<EdgeFrame> {
        let pts = table1();
        let order = hull_order(&pts).unwrap();
        let mut frames = edge_frames(&pts, &order, Vec2::new(0.0, 1.0)).unwrap();
        for f in &mut frames {
            f.lambda = lambda;
        }
        frames
    }

    #[test]
    fn detect_active_edge_examples() {
        let th = Thresholds { eps_act: 0.001, eps_exit: 0.002, eps_violation: 0.005, lambda_tol: 1e-6 };
        let frames = frames_with_lambda(0.5);
        let areas = |a: [f64; 3]| AreaVector { areas: a.to_vec() };

        assert_eq!(
            detect_active_edge(&areas([0.5, 0.9, 0.0008]), &frames, &th),
            EdgeDetection::Edge(Edge { position: 2, j: 2, k: 0 })
        );
        assert_eq!(detect_active_edge(&areas([0.5, 0.9, 0.4]), &frames, &th), EdgeDetection::None);
        assert_eq!(
            detect_active_edge(&areas([0.5, 0.9, -0.01]), &frames, &th),
            EdgeDetection::Violation(Edge { position: 2, j: 2, k: 0 })
        );
        // Small area but evader beyond the segment's end: not active.
        let outside = frames_with_lambda(1.5);
        assert_eq!(detect_active_edge(&areas([0.5, 0.9, 0.0008]), &outside, &th), EdgeDetection::None);
        // Two candidates: the smaller area wins; equal areas go to the lower position.
        assert_eq!(
            detect_active_edge(&areas([0.0005, 0.9, 0.0001]), &frames, &th),
            EdgeDetection::Edge(Edge { position: 2, j: 2, k: 0 })
        );
        assert_eq!(
            detect_active_edge(&areas([0.0005, 0.0005, 0.4]), &frames, &th),
            EdgeDetection::Edge(Edge { position: 0, j: 0, k: 1 })
        );
    }

    #[test]
    fn rotation_examples() {
        let r = rotate_cw(Vec2::new(1.0, 0.0), PI / 2.0);
        assert_abs_diff_eq!(r.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.y, -1.0, epsilon = 1e-15);

        let (alpha, phi) = (1.2, 0.4);
        let r = rotate_cw(Vec2::from_angle(alpha), phi);
        assert_abs_diff_eq!(r.x, (alpha - phi).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.y, (alpha - phi).sin(), epsilon = 1e-15);

        let v = Vec2::new(-0.3, 2.5);
        let back = rotate_ccw(rotate_cw(v, 0.77), 0.77);
        assert_abs_diff_eq!(back.x, v.x, epsilon = 1e-15);
        assert_abs_diff_eq!(back.y, v.y, epsilon = 1e-15);
    }

    #[test]
    fn segment_projection_clamps() {
        let a = Vec2::ZERO;
        let b = Vec2::new(2.0, 0.0);
        assert_eq!(closest_point_on_segment(Vec2::new(1.0, 3.0), a, b), Vec2::new(1.0, 0.0));
        assert_eq!(closest_point_on_segment(Vec2::new(-1.0, 3.0), a, b), a);
        assert_eq!(closest_point_on_segment(Vec2::new(5.0, -1.0), a, b), b);
    }
}
