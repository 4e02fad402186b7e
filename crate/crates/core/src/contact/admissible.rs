//! Strictly interior perturbations at contact.
//!
//! At an obstacle contact φ(x) must point into int T̂_η(x). At a self
//! contact φ(x) − φ(y) must lie in int T̂_η(x) − int T̂_η(y). For convex
//! sectors with nonempty interior that set is the interior of the convex
//! hull of T̂_η(x) ∪ (−T̂_η(y)), which is decided exactly on arcs.

use super::{ContactEvent, ContactKind, Partner};
use crate::body::{Deformation, ReferenceBody};
use crate::cones::{cone_contains, Containment, PolyCone};
use crate::geom::V2;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub event: usize,
    pub node: usize,
    pub reason: String,
    /// Signed angular margin of the tested direction (negative = outside).
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Admissibility {
    Admissible,
    Violating(Vec<Violation>),
}

impl Admissibility {
    pub fn is_admissible(&self) -> bool {
        matches!(self, Admissibility::Admissible)
    }
}

fn value_at_partner(body: &ReferenceBody, phi: &[V2], p: &Partner) -> V2 {
    match *p {
        Partner::Node(y) => phi[y],
        Partner::Edge { segment, t } => {
            let s = body.segments[segment];
            phi[s.a] * (1.0 - t) + phi[s.b] * t
        }
        Partner::Wall(_) => V2::zeros(),
    }
}

/// The cone int T̂x − int T̂y as the closed hull of T̂x ∪ −T̂y; membership
/// in the open set is `InteriorInside` on this closed cone.
pub fn difference_cone(x_cone: &PolyCone, y_cone: &PolyCone) -> PolyCone {
    x_cone.sum(&y_cone.negate())
}

pub fn admissible_direction_check(
    body: &ReferenceBody,
    _def: &Deformation,
    phi: &[V2],
    events: &[ContactEvent],
    tol: f64,
) -> Admissibility {
    let mut bad = Vec::new();
    for v in 0..body.n_nodes() {
        if body.gamma_node[v] && phi[v].norm() > 0.0 {
            bad.push(Violation {
                event: usize::MAX,
                node: v,
                reason: "nonzero on the Dirichlet boundary".into(),
                margin: f64::NEG_INFINITY,
            });
        }
    }
    for (i, e) in events.iter().enumerate() {
        match e.kind {
            ContactKind::Obstacle => {
                let v = phi[e.x_node];
                if cone_contains(&e.x_cone, &v, tol) != Containment::InteriorInside {
                    bad.push(Violation {
                        event: i,
                        node: e.x_node,
                        reason: "not strictly inside the regular tangent cone".into(),
                        margin: if v.norm() == 0.0 { 0.0 } else { e.x_cone.angular_margin(&v) },
                    });
                }
            }
            ContactKind::SelfContact => {
                let v = phi[e.x_node] - value_at_partner(body, phi, &e.partner);
                let d = difference_cone(&e.x_cone, &e.partner_cone);
                let ok = if v.norm() == 0.0 {
                    d.is_full()
                } else {
                    cone_contains(&d, &v, tol) == Containment::InteriorInside
                };
                if !ok {
                    bad.push(Violation {
                        event: i,
                        node: e.x_node,
                        reason: "relative motion not strictly inside the cone difference".into(),
                        margin: if v.norm() == 0.0 { 0.0 } else { d.angular_margin(&v) },
                    });
                }
            }
        }
    }
    if bad.is_empty() {
        Admissibility::Admissible
    } else {
        Admissibility::Violating(bad)
    }
}
