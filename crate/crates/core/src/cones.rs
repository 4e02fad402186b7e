//! Polyhedral cones in the plane.
//!
//! A cone is kept as a union of closed angular arcs. Each arc is a start
//! angle in [0, 2π) and a width in [0, 2π]; the arc covers the directions
//! swept counter-clockwise from the start. An empty arc list is the zero
//! cone. Arcs are merged and sorted on construction, so two cones that are
//! equal as sets have (up to round-off) equal arc lists.

use crate::body::ReferenceBody;
use crate::geom::{angle_of, unit_at, wrap, M2, V2};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use thiserror::Error;

/// Default angular tolerance for membership tests, in radians.
pub const ANGLE_TOL: f64 = 1e-8;

/// Gaps below this are closed when merging arcs.
const MERGE_EPS: f64 = 1e-12;

/// Snap distance for boundary point location.
const SNAP: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("point ({0}, {1}) is not on the boundary")]
    PointNotOnBoundary(f64, f64),
    #[error("singular gradient: det = {0:e}")]
    SingularGradient(f64),
    #[error("beta {beta} is not below the inscribed half-angle {beta0}")]
    BetaTooLarge { beta: f64, beta0: f64 },
    #[error("cone has empty interior")]
    EmptyInterior,
    #[error("degenerate boundary: best uniform angle {theta} below floor {floor}")]
    DegenerateBoundary { theta: f64, floor: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    InteriorInside,
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub start: f64,
    pub width: f64,
}

impl Arc {
    pub fn end(&self) -> f64 {
        self.start + self.width
    }

    /// Signed angular margin of direction `phi` inside this arc.
    /// Positive inside, negative outside, zero on a bounding ray.
    fn margin(&self, phi: f64) -> f64 {
        if self.width >= TAU {
            return PI;
        }
        let d = wrap(phi - self.start);
        if d <= self.width {
            d.min(self.width - d)
        } else {
            -(d - self.width).min(TAU - d)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyCone {
    arcs: Vec<Arc>,
}

impl PolyCone {
    pub fn zero() -> Self {
        PolyCone { arcs: vec![] }
    }

    pub fn full() -> Self {
        PolyCone {
            arcs: vec![Arc { start: 0.0, width: TAU }],
        }
    }

    /// Closed sector swept counter-clockwise from `start` by `width`.
    pub fn arc(start: f64, width: f64) -> Self {
        Self::from_arcs(vec![Arc { start, width }])
    }

    /// Convex sector spanned counter-clockwise from `from` to `to`.
    pub fn sector(from: &V2, to: &V2) -> Self {
        let s = angle_of(from);
        Self::arc(s, wrap(angle_of(to) - s))
    }

    pub fn ray(dir: &V2) -> Self {
        Self::arc(angle_of(dir), 0.0)
    }

    /// Half-plane {v : n·v ≥ 0}.
    pub fn half_plane(inward_normal: &V2) -> Self {
        Self::arc(angle_of(inward_normal) - FRAC_PI_2, PI)
    }

    /// Cone {w : w·v ≥ cos θ |w||v|} around `v`.
    pub fn circular(v: &V2, theta: f64) -> Self {
        Self::arc(angle_of(v) - theta, 2.0 * theta)
    }

    pub fn from_arcs(arcs: Vec<Arc>) -> Self {
        let mut c = PolyCone { arcs };
        c.normalize();
        c
    }

    fn normalize(&mut self) {
        let mut arcs: Vec<Arc> = self
            .arcs
            .iter()
            .filter(|a| a.width >= 0.0 && a.width.is_finite() && a.start.is_finite())
            .map(|a| Arc {
                start: wrap(a.start),
                width: a.width.min(TAU),
            })
            .collect();
        if arcs.iter().any(|a| a.width >= TAU - MERGE_EPS) {
            self.arcs = vec![Arc { start: 0.0, width: TAU }];
            return;
        }
        arcs.sort_by(|a, b| a.start.total_cmp(&b.start));
        let mut merged: Vec<Arc> = Vec::with_capacity(arcs.len());
        for a in arcs {
            if let Some(last) = merged.last_mut() {
                if a.start <= last.end() + MERGE_EPS {
                    let end = last.end().max(a.end());
                    last.width = end - last.start;
                    continue;
                }
            }
            merged.push(a);
        }
        // wrap-around merge of the last arc into the first
        if merged.len() > 1 {
            let last = *merged.last().unwrap();
            let first = merged[0];
            if last.end() >= first.start + TAU - MERGE_EPS {
                let end = (first.end() + TAU).max(last.end());
                merged.pop();
                merged[0] = Arc {
                    start: last.start,
                    width: end - last.start,
                };
                merged.sort_by(|a, b| a.start.total_cmp(&b.start));
            }
        }
        if merged.iter().any(|a| a.width >= TAU - MERGE_EPS) {
            merged = vec![Arc { start: 0.0, width: TAU }];
        }
        self.arcs = merged;
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn is_zero(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].width >= TAU
    }

    /// A line through the origin (two opposite rays).
    pub fn is_line(&self) -> bool {
        self.arcs.len() == 2
            && self.arcs.iter().all(|a| a.width <= MERGE_EPS)
            && (wrap(self.arcs[1].start - self.arcs[0].start) - PI).abs() <= 1e-12
    }

    pub fn is_convex(&self) -> bool {
        match self.arcs.len() {
            0 => true,
            1 => self.arcs[0].width <= PI + MERGE_EPS || self.is_full(),
            _ => self.is_line(),
        }
    }

    pub fn has_interior(&self) -> bool {
        self.arcs.iter().any(|a| a.width > MERGE_EPS)
    }

    /// Convex pieces, each of width at most π. Nonconvex arcs are split in
    /// two, so a reflex tangent cone comes back as a pair of sectors.
    pub fn sectors(&self) -> Vec<Arc> {
        let mut out = Vec::new();
        for a in &self.arcs {
            if a.width > PI + MERGE_EPS {
                let half = 0.5 * a.width;
                out.push(Arc {
                    start: a.start,
                    width: half,
                });
                out.push(Arc {
                    start: wrap(a.start + half),
                    width: half,
                });
            } else {
                out.push(*a);
            }
        }
        out
    }

    /// Unit generators. Every sector contributes its bounding rays; a
    /// sector of width π (a half-plane) also contributes its bisector so
    /// that the conic hull of the generators is the sector itself.
    pub fn generators(&self) -> Vec<V2> {
        if self.is_full() {
            return vec![
                V2::new(1.0, 0.0),
                V2::new(0.0, 1.0),
                V2::new(-1.0, 0.0),
                V2::new(0.0, -1.0),
            ];
        }
        let mut g = Vec::new();
        for s in self.sectors() {
            g.push(unit_at(s.start));
            if s.width > MERGE_EPS {
                if s.width >= PI - 1e-9 {
                    g.push(unit_at(s.start + 0.5 * s.width));
                }
                g.push(unit_at(s.end()));
            }
        }
        g
    }

    /// Inward normals `a` with the convex cone equal to {v : a·v ≥ 0 ∀a}.
    /// Empty for nonconvex cones other than the zero cone and a line.
    pub fn halfspaces(&self) -> Vec<V2> {
        if self.is_zero() {
            return vec![
                V2::new(1.0, 0.0),
                V2::new(-1.0, 0.0),
                V2::new(0.0, 1.0),
                V2::new(0.0, -1.0),
            ];
        }
        if self.is_full() {
            return vec![];
        }
        if self.is_line() {
            let n = unit_at(self.arcs[0].start + FRAC_PI_2);
            return vec![n, -n];
        }
        if !self.is_convex() {
            return vec![];
        }
        let a = self.arcs[0];
        if a.width >= PI - MERGE_EPS {
            return vec![unit_at(a.start + FRAC_PI_2)];
        }
        if a.width <= MERGE_EPS {
            return vec![
                unit_at(a.start + FRAC_PI_2),
                unit_at(a.start - FRAC_PI_2),
                unit_at(a.start),
            ];
        }
        vec![unit_at(a.start + FRAC_PI_2), unit_at(a.end() - FRAC_PI_2)]
    }

    /// Largest signed angular margin of `v` inside any arc.
    pub fn angular_margin(&self, v: &V2) -> f64 {
        if self.is_full() {
            return PI;
        }
        let phi = angle_of(v);
        self.arcs
            .iter()
            .map(|a| a.margin(phi))
            .fold(-PI, f64::max)
    }

    pub fn intersect(&self, other: &PolyCone) -> PolyCone {
        if self.is_full() {
            return other.clone();
        }
        if other.is_full() {
            return self.clone();
        }
        let mut out = Vec::new();
        for a in &self.arcs {
            for b in &other.arcs {
                for shift in [-TAU, 0.0, TAU] {
                    let lo = a.start.max(b.start + shift);
                    let hi = a.end().min(b.end() + shift);
                    if hi >= lo - MERGE_EPS {
                        out.push(Arc {
                            start: lo,
                            width: (hi - lo).max(0.0),
                        });
                    }
                }
            }
        }
        PolyCone::from_arcs(out)
    }

    pub fn union(&self, other: &PolyCone) -> PolyCone {
        let mut arcs = self.arcs.clone();
        arcs.extend_from_slice(&other.arcs);
        PolyCone::from_arcs(arcs)
    }

    pub fn negate(&self) -> PolyCone {
        PolyCone::from_arcs(
            self.arcs
                .iter()
                .map(|a| Arc {
                    start: a.start + PI,
                    width: a.width,
                })
                .collect(),
        )
    }

    /// Closed convex hull, computed as the double polar.
    pub fn convex_hull(&self) -> PolyCone {
        polar_cone(&polar_cone(self))
    }

    /// Minkowski sum of two cones; for convex inputs this is the hull of
    /// the union.
    pub fn sum(&self, other: &PolyCone) -> PolyCone {
        if self.is_zero() {
            return other.convex_hull();
        }
        if other.is_zero() {
            return self.convex_hull();
        }
        self.union(other).convex_hull()
    }

    /// `self ⊆ other` up to `tol` radians.
    pub fn is_subset_of(&self, other: &PolyCone, tol: f64) -> bool {
        if other.is_full() {
            return true;
        }
        if self.is_full() {
            return false;
        }
        self.arcs.iter().all(|a| {
            other.arcs.iter().any(|b| {
                let mut d = wrap(a.start - b.start);
                if d > TAU - tol {
                    d -= TAU;
                }
                d >= -tol && d + a.width <= b.width + tol
            })
        })
    }

    pub fn approx_eq(&self, other: &PolyCone, tol: f64) -> bool {
        self.is_subset_of(other, tol) && other.is_subset_of(self, tol)
    }

    /// Bisector and half-width of the widest inscribed circular cone,
    /// capped at π/2 so the inscribed cone stays convex.
    pub fn inscribed_axis(&self) -> Option<(V2, f64)> {
        if self.is_full() {
            return Some((V2::new(1.0, 0.0), FRAC_PI_2));
        }
        let best = self
            .arcs
            .iter()
            .filter(|a| a.width > MERGE_EPS)
            .max_by(|a, b| a.width.total_cmp(&b.width))?;
        let half = 0.5 * best.width;
        Some((unit_at(best.start + half), half.min(FRAC_PI_2)))
    }
}

/// Polar cone {w : w·v ≤ 0 for all v ∈ c}.
pub fn polar_cone(c: &PolyCone) -> PolyCone {
    if c.is_zero() {
        return PolyCone::full();
    }
    if c.is_full() {
        return PolyCone::zero();
    }
    let mut acc = PolyCone::full();
    for a in &c.arcs {
        if a.width > PI + MERGE_EPS {
            return PolyCone::zero();
        }
        let w = (PI - a.width).max(0.0);
        acc = acc.intersect(&PolyCone::arc(a.end() + FRAC_PI_2, w));
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// K_β = {w : w·v ≤ sin β |w||v| for all v ∈ c}. Returns the cone together
/// with the inscribed axis v₀ that certifies v₀·w < 0 on K_β∖{0}.
pub fn enlarged_polar_cone(c: &PolyCone, beta: f64) -> Result<(PolyCone, V2), ConeError> {
    let (v0, beta0) = c.inscribed_axis().ok_or(ConeError::EmptyInterior)?;
    if !(beta >= 0.0 && beta < beta0) {
        return Err(ConeError::BetaTooLarge { beta, beta0 });
    }
    if beta == 0.0 {
        return Ok((polar_cone(c), v0));
    }
    let mut acc = PolyCone::full();
    for a in &c.arcs {
        let w = PI - a.width + 2.0 * beta;
        if w < 0.0 {
            return Ok((PolyCone::zero(), v0));
        }
        acc = acc.intersect(&PolyCone::arc(a.end() + FRAC_PI_2 - beta, w));
    }
    Ok((acc, v0))
}

fn push_forward(c: &PolyCone, f: &M2) -> Result<PolyCone, ConeError> {
    let det = f.determinant();
    if !(det >= 1e-12) {
        return Err(ConeError::SingularGradient(det));
    }
    if c.is_zero() || c.is_full() {
        return Ok(c.clone());
    }
    let mut out = Vec::new();
    for a in &c.arcs {
        let pieces = (a.width / FRAC_PI_2).ceil().max(1.0) as usize;
        let step = a.width / pieces as f64;
        for k in 0..pieces {
            let s = a.start + step * k as f64;
            let u = f * unit_at(s);
            let e = f * unit_at(s + step);
            let su = angle_of(&u);
            let w = if step <= 0.0 { 0.0 } else { wrap(angle_of(&e) - su) };
            // round-off can send a tiny positive width to just below 2π
            let w = if w > PI { 0.0 } else { w };
            out.push(Arc { start: su, width: w });
        }
    }
    Ok(PolyCone::from_arcs(out))
}

/// Image of a tangent cone under v ↦ F v.
pub fn push_forward_tangent(c: &PolyCone, f: &M2) -> Result<PolyCone, ConeError> {
    push_forward(c, f)
}

/// Image of a normal cone under n ↦ cof(F) n.
pub fn push_forward_normal(c: &PolyCone, f: &M2) -> Result<PolyCone, ConeError> {
    let det = f.determinant();
    if !(det >= 1e-12) {
        return Err(ConeError::SingularGradient(det));
    }
    push_forward(c, &crate::geom::cof(f))
}

pub fn cone_contains(c: &PolyCone, v: &V2, tol: f64) -> Containment {
    if v.norm() == 0.0 {
        return Containment::Inside;
    }
    if c.is_zero() {
        return Containment::Outside;
    }
    let m = c.angular_margin(v);
    if m > tol {
        Containment::InteriorInside
    } else if m >= -tol {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

/// Polygon-local corner data.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerDescriptor {
    pub vertex: V2,
    /// Unit vectors along the outgoing and (reversed) incoming edges.
    pub edge_dirs: [V2; 2],
    pub interior_angle: f64,
}

impl CornerDescriptor {
    pub fn new(prev: &V2, vertex: &V2, next: &V2) -> Self {
        let out = (next - vertex).normalize();
        let back = (prev - vertex).normalize();
        CornerDescriptor {
            vertex: *vertex,
            edge_dirs: [out, back],
            interior_angle: wrap(angle_of(&back) - angle_of(&out)),
        }
    }

    pub fn is_reflex(&self) -> bool {
        self.interior_angle > PI
    }

    pub fn tangent(&self) -> PolyCone {
        PolyCone::arc(angle_of(&self.edge_dirs[0]), self.interior_angle)
    }

    /// Intersection of the two adjacent edge half-planes.
    pub fn regular_tangent(&self) -> PolyCone {
        let out = self.edge_dirs[0];
        let inc = -self.edge_dirs[1];
        let n_out = crate::geom::perp(&out);
        let n_in = crate::geom::perp(&inc);
        PolyCone::half_plane(&n_out).intersect(&PolyCone::half_plane(&n_in))
    }
}

/// Where a boundary point sits on a polygonal body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryLocation {
    Vertex { component: usize, index: usize },
    Edge { component: usize, index: usize, t: f64 },
}

pub fn locate_boundary_point(polys: &[Vec<V2>], x: &V2) -> Result<BoundaryLocation, ConeError> {
    let mut best: Option<(f64, BoundaryLocation)> = None;
    for (ci, poly) in polys.iter().enumerate() {
        let n = poly.len();
        for i in 0..n {
            let dv = (poly[i] - x).norm();
            if dv <= SNAP {
                return Ok(BoundaryLocation::Vertex {
                    component: ci,
                    index: i,
                });
            }
            let (d, t) = crate::geom::point_segment(x, &poly[i], &poly[(i + 1) % n]);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((
                    d,
                    BoundaryLocation::Edge {
                        component: ci,
                        index: i,
                        t,
                    },
                ));
            }
        }
    }
    match best {
        Some((d, loc)) if d <= SNAP => Ok(loc),
        _ => Err(ConeError::PointNotOnBoundary(x.x, x.y)),
    }
}

pub fn corner(polys: &[Vec<V2>], component: usize, index: usize) -> CornerDescriptor {
    let p = &polys[component];
    let n = p.len();
    CornerDescriptor::new(&p[(index + n - 1) % n], &p[index], &p[(index + 1) % n])
}

fn edge_half_plane(polys: &[Vec<V2>], component: usize, index: usize) -> PolyCone {
    let p = &polys[component];
    let d = p[(index + 1) % p.len()] - p[index];
    PolyCone::half_plane(&crate::geom::perp(&d))
}

pub fn tangent_cone_polys(polys: &[Vec<V2>], x: &V2) -> Result<PolyCone, ConeError> {
    Ok(match locate_boundary_point(polys, x)? {
        BoundaryLocation::Vertex { component, index } => corner(polys, component, index).tangent(),
        BoundaryLocation::Edge {
            component, index, ..
        } => edge_half_plane(polys, component, index),
    })
}

pub fn regular_tangent_cone_polys(polys: &[Vec<V2>], x: &V2) -> Result<PolyCone, ConeError> {
    Ok(match locate_boundary_point(polys, x)? {
        BoundaryLocation::Vertex { component, index } => {
            corner(polys, component, index).regular_tangent()
        }
        BoundaryLocation::Edge {
            component, index, ..
        } => edge_half_plane(polys, component, index),
    })
}

pub fn tangent_cone(body: &ReferenceBody, x: &V2) -> Result<PolyCone, ConeError> {
    tangent_cone_polys(&body.components, x)
}

pub fn regular_tangent_cone(body: &ReferenceBody, x: &V2) -> Result<PolyCone, ConeError> {
    regular_tangent_cone_polys(&body.components, x)
}

pub fn convexified_normal_cone(body: &ReferenceBody, x: &V2) -> Result<PolyCone, ConeError> {
    Ok(polar_cone(&regular_tangent_cone(body, x)?))
}

/// One chart of the uniform cone certificate: the boundary arc from the
/// midpoint of the incoming edge through a vertex to the midpoint of the
/// outgoing edge, with a direction whose θ-cone fits in every T̂ on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub component: usize,
    pub vertex: usize,
    /// Polyline of the arc: [mid of incoming edge, vertex, mid of outgoing edge].
    pub arc: [V2; 3],
    pub direction: V2,
    /// Largest half-angle admissible on this chart.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConeCertificate {
    pub theta: f64,
    pub charts: Vec<Chart>,
}

impl ConeCertificate {
    /// Checks L_{θ,v_i} ⊆ T̂(x) at `samples` points along every chart arc.
    pub fn verify(&self, polys: &[Vec<V2>], samples: usize) -> bool {
        for ch in &self.charts {
            let l = PolyCone::circular(&ch.direction, self.theta);
            for k in 0..samples {
                let s = (k as f64 + 0.5) / samples as f64 * 2.0;
                let x = if s < 1.0 {
                    ch.arc[0] + (ch.arc[1] - ch.arc[0]) * s
                } else {
                    ch.arc[1] + (ch.arc[2] - ch.arc[1]) * (s - 1.0)
                };
                let Ok(t) = regular_tangent_cone_polys(polys, &x) else {
                    return false;
                };
                if !l.is_subset_of(&t, 1e-12) {
                    return false;
                }
            }
            let t = regular_tangent_cone_polys(polys, &ch.arc[1]).unwrap_or_else(|_| PolyCone::zero());
            if !l.is_subset_of(&t, 1e-12) {
                return false;
            }
        }
        true
    }
}

/// Chart cover of the boundary with a uniform cone angle. The returned θ
/// sits 1e-9 below the exact supremum, so every inclusion is strict.
pub fn lipschitz_uniform_cone_certificate_polys(
    polys: &[Vec<V2>],
    angle_floor: f64,
) -> Result<ConeCertificate, ConeError> {
    let mut charts = Vec::new();
    let mut theta = f64::INFINITY;
    for (ci, p) in polys.iter().enumerate() {
        let n = p.len();
        for i in 0..n {
            let cd = corner(polys, ci, i);
            let rt = cd.regular_tangent();
            let (dir, half) = match rt.arcs().first() {
                Some(a) if a.width > 0.0 => (unit_at(a.start + 0.5 * a.width), 0.5 * a.width),
                _ => (cd.edge_dirs[0], 0.0),
            };
            let th = half - 1e-9;
            theta = theta.min(th);
            let prev = p[(i + n - 1) % n];
            let next = p[(i + 1) % n];
            charts.push(Chart {
                component: ci,
                vertex: i,
                arc: [0.5 * (prev + p[i]), p[i], 0.5 * (p[i] + next)],
                direction: dir,
                theta: th,
            });
        }
    }
    if !(theta >= angle_floor) || !theta.is_finite() {
        return Err(ConeError::DegenerateBoundary {
            theta,
            floor: angle_floor,
        });
    }
    Ok(ConeCertificate { theta, charts })
}

pub fn lipschitz_uniform_cone_certificate(
    body: &ReferenceBody,
    angle_floor: f64,
) -> Result<ConeCertificate, ConeError> {
    lipschitz_uniform_cone_certificate_polys(&body.components, angle_floor)
}

/// Half-width of the widest sector shared by two cones. Zero means the
/// interiors are disjoint.
pub fn interior_overlap_angle(a: &PolyCone, b: &PolyCone) -> f64 {
    a.intersect(b)
        .arcs()
        .iter()
        .map(|x| 0.5 * x.width)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v2;

    fn quadrant(k: usize) -> PolyCone {
        PolyCone::arc(FRAC_PI_2 * k as f64, FRAC_PI_2)
    }

    #[test]
    fn polar_of_quadrant_is_opposite_quadrant() {
        let p = polar_cone(&quadrant(0));
        assert!(p.approx_eq(&quadrant(2), 1e-12));
        let g = p.generators();
        assert_eq!(g.len(), 2);
        assert!(g.iter().any(|v| (v - v2(-1.0, 0.0)).norm() < 1e-12));
        assert!(g.iter().any(|v| (v - v2(0.0, -1.0)).norm() < 1e-12));
    }

    #[test]
    fn polar_of_half_plane_is_ray() {
        let h = PolyCone::half_plane(&v2(0.0, 1.0));
        let p = polar_cone(&h);
        assert!(p.approx_eq(&PolyCone::ray(&v2(0.0, -1.0)), 1e-12));
        assert!(polar_cone(&PolyCone::zero()).is_full());
        assert!(polar_cone(&PolyCone::full()).is_zero());
    }

    #[test]
    fn polar_of_line_is_line() {
        let line = PolyCone::ray(&v2(1.0, 0.0)).union(&PolyCone::ray(&v2(-1.0, 0.0)));
        assert!(line.is_line() && line.is_convex());
        let p = polar_cone(&line);
        assert!(p.is_line());
        assert_eq!(cone_contains(&p, &v2(0.0, 3.0), 1e-9), Containment::Inside);
    }

    #[test]
    fn containment_cases() {
        let q = quadrant(0);
        assert_eq!(cone_contains(&q, &v2(1.0, 1.0), 1e-6), Containment::InteriorInside);
        assert_eq!(cone_contains(&q, &v2(1.0, 0.0), 1e-6), Containment::Inside);
        assert_eq!(cone_contains(&q, &v2(-1.0, 0.0), 1e-6), Containment::Outside);
        assert_eq!(cone_contains(&q, &v2(0.0, 0.0), 1e-6), Containment::Inside);
    }

    #[test]
    fn wrap_merge() {
        let c = PolyCone::from_arcs(vec![
            Arc { start: 5.5, width: 1.0 },
            Arc { start: 0.2, width: 0.3 },
        ]);
        assert_eq!(c.arcs().len(), 1);
        assert!((c.arcs()[0].width - (TAU - 5.5 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn reflex_sector_splits_in_two() {
        let c = PolyCone::arc(FRAC_PI_2, 1.5 * PI);
        assert!(!c.is_convex());
        assert_eq!(c.sectors().len(), 2);
        assert!(c.halfspaces().is_empty());
        assert!(c.convex_hull().is_full());
    }

    #[test]
    fn halfspaces_describe_convex_cone() {
        let c = PolyCone::arc(0.3, 1.1);
        let hs = c.halfspaces();
        for k in 0..360 {
            let v = unit_at(k as f64 * PI / 180.0 + 0.001);
            let by_hs = hs.iter().all(|a| a.dot(&v) >= 0.0);
            let by_arc = cone_contains(&c, &v, 0.0) != Containment::Outside;
            assert_eq!(by_hs, by_arc);
        }
        for g in c.generators() {
            assert!(hs.iter().all(|a| a.dot(&g) >= -1e-12));
        }
    }

    #[test]
    fn enlarged_polar_degenerates_to_polar() {
        let (k, v0) = enlarged_polar_cone(&quadrant(0), 0.0).unwrap();
        assert!(k.approx_eq(&quadrant(2), 1e-12));
        assert!((v0 - v2(1.0, 1.0).normalize()).norm() < 1e-12);
        assert!(matches!(
            enlarged_polar_cone(&quadrant(0), FRAC_PI_2),
            Err(ConeError::BetaTooLarge { .. })
        ));
    }

    #[test]
    fn push_forward_identity_and_scaling() {
        let c = PolyCone::arc(0.4, 2.0);
        let a = push_forward_tangent(&c, &M2::identity()).unwrap();
        let b = push_forward_tangent(&c, &(M2::identity() * 2.0)).unwrap();
        assert!(a.approx_eq(&c, 1e-12));
        assert!(b.approx_eq(&c, 1e-12));
        assert!(matches!(
            push_forward_tangent(&c, &M2::zeros()),
            Err(ConeError::SingularGradient(_))
        ));
    }

    #[test]
    fn corner_descriptor_angles() {
        let cd = CornerDescriptor::new(&v2(0.0, 1.0), &v2(0.0, 0.0), &v2(1.0, 0.0));
        assert!((cd.interior_angle - FRAC_PI_2).abs() < 1e-12);
        assert!(!cd.is_reflex());
    }
}
