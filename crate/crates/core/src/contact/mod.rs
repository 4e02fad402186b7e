//! Contact detection, injectivity audit, admissible directions, interior
//! fields and contact force validation.

mod admissible;
mod defect;
mod interior;
mod validate;

pub use admissible::{admissible_direction_check, Admissibility, Violation};
pub use defect::{ciarlet_necas_defect, triangles_overlap, union_area};
pub use interior::{uniformly_interior_field, InteriorField};
pub use validate::{
    validate_contact_force, ContactForce, ForceAtom, ForceReport, Pairing,
};

use crate::body::{Container, Deformation, ReferenceBody};
use crate::cones::{push_forward_tangent, PolyCone};
use crate::geom::{perp, point_segment, V2};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContactError {
    #[error("degenerate element {0}")]
    DegenerateElement(usize),
    #[error("CertificateFailure: achieved angle {theta:e} below floor {floor:e} at node {node}")]
    CertificateFailure { theta: f64, floor: f64, node: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContactKind {
    Obstacle,
    SelfContact,
}

impl ContactKind {
    pub fn label(&self) -> &'static str {
        match self {
            ContactKind::Obstacle => "obstacle",
            ContactKind::SelfContact => "self",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Partner {
    Wall(usize),
    Node(usize),
    Edge { segment: usize, t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContactEvent {
    pub kind: ContactKind,
    pub x_node: usize,
    pub partner: Partner,
    pub gap: f64,
    /// Deformed regular tangent cone at the node.
    pub x_cone: PolyCone,
    /// Deformed regular tangent cone on the partner side.
    pub partner_cone: PolyCone,
}

/// Pair filter fixed at the initial state: which boundary segments may act
/// as contact partners of which boundary nodes.
#[derive(Debug, Clone)]
pub struct ContactGeometry {
    pub r_loc: f64,
    /// Per node, the admissible partner segments (empty for interior nodes).
    pub candidates: Vec<Vec<usize>>,
}

/// r_loc = scale · min det / (2 ‖∇η‖³), a lower bound on the reference
/// distance between two boundary points that can touch.
pub fn local_injectivity_radius(def: &Deformation, scale: f64) -> f64 {
    let g = def.max_grad_norm();
    scale * def.min_det() / (2.0 * g * g * g)
}

impl ContactGeometry {
    pub fn new(body: &ReferenceBody, def: &Deformation, r_loc_scale: f64) -> Self {
        let r_loc = local_injectivity_radius(def, r_loc_scale);
        let mut candidates = vec![Vec::new(); body.n_nodes()];
        for v in body.boundary_nodes() {
            let (sin, sout) = body.node_segments[v].unwrap();
            let x = body.nodes[v];
            for (s, seg) in body.segments.iter().enumerate() {
                if s == sin || s == sout {
                    continue;
                }
                if seg.component == body.node_component[v] {
                    let d = point_segment(&x, &body.nodes[seg.a], &body.nodes[seg.b]).0;
                    if d <= r_loc {
                        continue;
                    }
                }
                candidates[v].push(s);
            }
        }
        ContactGeometry { r_loc, candidates }
    }
}

/// Half-plane of a deformed boundary segment, obtained by pushing the
/// reference half-plane forward with the owning element's gradient.
pub fn segment_cone(body: &ReferenceBody, def: &Deformation, s: usize) -> PolyCone {
    let seg = body.segments[s];
    let d = body.nodes[seg.b] - body.nodes[seg.a];
    let reference = PolyCone::half_plane(&perp(&d));
    let f = def.grads[body.segment_triangle[s]];
    push_forward_tangent(&reference, &f).unwrap_or_else(|_| {
        let dd = def.positions[seg.b] - def.positions[seg.a];
        PolyCone::half_plane(&perp(&dd))
    })
}

/// Deformed regular tangent cone at a boundary node: the intersection of
/// the pushed-forward half-planes of its two boundary segments.
pub fn node_cone(body: &ReferenceBody, def: &Deformation, v: usize) -> PolyCone {
    match body.node_segments[v] {
        Some((sin, sout)) => segment_cone(body, def, sin).intersect(&segment_cone(body, def, sout)),
        None => PolyCone::full(),
    }
}

/// Convexified normal cone at a boundary node in the deformed state.
pub fn node_normal_cone(body: &ReferenceBody, def: &Deformation, v: usize) -> PolyCone {
    crate::cones::polar_cone(&node_cone(body, def, v))
}

/// Boundary nodes within `tol_contact` of a container wall or of an
/// admissible partner segment. One event per (node, partner component);
/// a node–node pair is reported once.
pub fn contact_set(
    body: &ReferenceBody,
    def: &Deformation,
    container: &Container,
    geometry: &ContactGeometry,
    tol_contact: f64,
) -> Vec<ContactEvent> {
    let pos = &def.positions;
    let mut events = Vec::new();
    for v in body.boundary_nodes() {
        let x = pos[v];
        let x_cone = node_cone(body, def, v);
        for (w, gap, n) in container.wall_gaps(&x) {
            if gap <= tol_contact {
                events.push(ContactEvent {
                    kind: ContactKind::Obstacle,
                    x_node: v,
                    partner: Partner::Wall(w),
                    gap,
                    x_cone: x_cone.clone(),
                    partner_cone: PolyCone::half_plane(&n),
                });
            }
        }
        let mut best: Vec<Option<(f64, usize, f64)>> = vec![None; body.components.len()];
        for &s in &geometry.candidates[v] {
            let seg = body.segments[s];
            let (d, t) = point_segment(&x, &pos[seg.a], &pos[seg.b]);
            let slot = &mut best[seg.component];
            if slot.map_or(true, |(bd, _, _)| d < bd) {
                *slot = Some((d, s, t));
            }
        }
        for (d, s, t) in best.into_iter().flatten() {
            if d > tol_contact {
                continue;
            }
            let seg = body.segments[s];
            let partner = if t <= 1e-9 {
                Partner::Node(seg.a)
            } else if t >= 1.0 - 1e-9 {
                Partner::Node(seg.b)
            } else {
                Partner::Edge { segment: s, t }
            };
            let partner_cone = match partner {
                Partner::Node(y) => node_cone(body, def, y),
                _ => segment_cone(body, def, s),
            };
            events.push(ContactEvent {
                kind: ContactKind::SelfContact,
                x_node: v,
                partner,
                gap: d,
                x_cone: x_cone.clone(),
                partner_cone,
            });
        }
    }
    // drop the mirror copy of node-node pairs
    let mut keep = vec![true; events.len()];
    for i in 0..events.len() {
        if let Partner::Node(y) = events[i].partner {
            let x = events[i].x_node;
            if y < x
                && events.iter().any(|e| {
                    e.x_node == y && matches!(e.partner, Partner::Node(z) if z == x)
                })
            {
                keep[i] = false;
            }
        }
    }
    events
        .into_iter()
        .zip(keep)
        .filter_map(|(e, k)| k.then_some(e))
        .collect()
}

/// Nodes appearing in any event, on either side.
pub fn contact_nodes(body: &ReferenceBody, events: &[ContactEvent]) -> Vec<bool> {
    let mut on = vec![false; body.n_nodes()];
    for e in events {
        on[e.x_node] = true;
        match e.partner {
            Partner::Node(y) => on[y] = true,
            Partner::Edge { segment, .. } => {
                on[body.segments[segment].a] = true;
                on[body.segments[segment].b] = true;
            }
            Partner::Wall(_) => {}
        }
    }
    on
}

/// Largest half-angle shared by the interiors of the two deformed cones of
/// any self-contact event. Zero when every pair has disjoint interiors.
pub fn max_self_contact_overlap(events: &[ContactEvent]) -> f64 {
    events
        .iter()
        .filter(|e| e.kind == ContactKind::SelfContact)
        .map(|e| crate::cones::interior_overlap_angle(&e.x_cone, &e.partner_cone))
        .fold(0.0, f64::max)
}

/// Smallest gap to any wall or admissible partner segment.
pub fn min_gap(
    body: &ReferenceBody,
    pos: &[V2],
    container: &Container,
    geometry: &ContactGeometry,
) -> f64 {
    let mut g = f64::INFINITY;
    for v in body.boundary_nodes() {
        for (_, d, _) in container.wall_gaps(&pos[v]) {
            g = g.min(d);
        }
        for &s in &geometry.candidates[v] {
            let seg = body.segments[s];
            g = g.min(point_segment(&pos[v], &pos[seg.a], &pos[seg.b]).0);
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{build_mesh, interpolate_gradient_and_hessian, HalfPlane};
    use crate::geom::v2;

    fn sq(x: f64, y: f64) -> Vec<V2> {
        vec![v2(x, y), v2(x + 1., y), v2(x + 1., y + 1.), v2(x, y + 1.)]
    }

    #[test]
    fn floating_square_has_no_contact() {
        let b = build_mesh(&[sq(0., 1.)], &[], 0.25).unwrap();
        let d = b.identity();
        let floor = Container::HalfPlanes(vec![HalfPlane {
            point: v2(0., 0.),
            normal: v2(0., 1.),
        }]);
        let g = ContactGeometry::new(&b, &d, 0.02);
        assert!(contact_set(&b, &d, &floor, &g, 1e-3).is_empty());
    }

    #[test]
    fn resting_square_touches_with_bottom_nodes() {
        let b = build_mesh(&[sq(0., 0.)], &[], 0.25).unwrap();
        let d = b.identity();
        let floor = Container::HalfPlanes(vec![HalfPlane {
            point: v2(0., 0.),
            normal: v2(0., 1.),
        }]);
        let g = ContactGeometry::new(&b, &d, 0.02);
        let ev = contact_set(&b, &d, &floor, &g, 1e-3);
        assert_eq!(ev.len(), 5);
        assert!(ev.iter().all(|e| e.kind == ContactKind::Obstacle && b.nodes[e.x_node].y == 0.0));
    }

    #[test]
    fn node_cone_follows_rotation() {
        let b = build_mesh(&[sq(0., 0.)], &[], 0.5).unwrap();
        let r = nalgebra::Rotation2::new(0.3).into_inner();
        let d = interpolate_gradient_and_hessian(&b, b.nodes.iter().map(|p| r * p).collect());
        let corner = b.node_vertex.iter().position(|v| *v == Some(0)).unwrap();
        let c = node_cone(&b, &d, corner);
        let expect = PolyCone::arc(0.3, std::f64::consts::FRAC_PI_2);
        assert!(c.approx_eq(&expect, 1e-12));
    }
}
