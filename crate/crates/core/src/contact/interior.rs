//! A boundary vector field pointing uniformly into the deformed body.

use super::{node_cone, ContactError};
use crate::body::{Deformation, ReferenceBody};
use crate::geom::V2;

#[derive(Debug, Clone, PartialEq)]
pub struct InteriorField {
    /// Unit vectors on free boundary nodes, zero elsewhere.
    pub field: Vec<V2>,
    /// Smallest angular margin of the field inside the deformed cones.
    pub theta: f64,
    pub margins: Vec<f64>,
    pub worst_node: Option<usize>,
}

/// Reference direction at a boundary node: the bisector of the reference
/// cone, which is the inward normal on edges.
fn reference_direction(body: &ReferenceBody, id: &Deformation, v: usize) -> V2 {
    node_cone(body, id, v)
        .inscribed_axis()
        .map(|(d, _)| d)
        .unwrap_or_else(V2::zeros)
}

/// Pushes the reference bisectors forward with the recovered nodal
/// gradient and measures how deep they sit in the deformed cones.
pub fn uniformly_interior_field(
    body: &ReferenceBody,
    def: &Deformation,
    theta_floor: f64,
) -> Result<InteriorField, ContactError> {
    let grads = crate::body::recovered_nodal_gradients(body, def);
    let id = body.identity();
    let n = body.n_nodes();
    let mut field = vec![V2::zeros(); n];
    let mut margins = vec![f64::INFINITY; n];
    let mut theta = f64::INFINITY;
    let mut worst_node = None;
    for v in body.boundary_nodes() {
        if body.gamma_node[v] {
            continue;
        }
        let d = grads[v] * reference_direction(body, &id, v);
        let norm = d.norm();
        if !(norm > 0.0) {
            return Err(ContactError::CertificateFailure { theta: 0.0, floor: theta_floor, node: v });
        }
        let d = d / norm;
        let m = node_cone(body, def, v).angular_margin(&d);
        field[v] = d;
        margins[v] = m;
        if m < theta {
            theta = m;
            worst_node = Some(v);
        }
    }
    if theta < theta_floor {
        return Err(ContactError::CertificateFailure {
            theta,
            floor: theta_floor,
            node: worst_node.unwrap_or(0),
        });
    }
    Ok(InteriorField { field, theta, margins, worst_node })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{build_mesh, interpolate_gradient_and_hessian};
    use crate::geom::v2;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn square_field_has_corner_margin_of_a_quarter_turn_half() {
        let b = build_mesh(&[vec![v2(0., 0.), v2(1., 0.), v2(1., 1.), v2(0., 1.)]], &[], 0.25).unwrap();
        let f = uniformly_interior_field(&b, &b.identity(), 1e-3).unwrap();
        assert!((f.theta - FRAC_PI_4).abs() < 1e-9);
        // shear keeps the field inside
        let s = nalgebra::Matrix2::new(1.0, 0.3, 0.0, 1.0);
        let d = interpolate_gradient_and_hessian(&b, b.nodes.iter().map(|p| s * p).collect());
        let f = uniformly_interior_field(&b, &d, 1e-3).unwrap();
        assert!(f.theta > 0.5 && f.theta < FRAC_PI_4);
    }
}
