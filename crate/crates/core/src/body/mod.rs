//! Reference configurations, meshes and deformations.

pub mod io;
mod mesh;

use crate::geom::{cross, perp, point_segment, M2, V2};
use std::collections::BTreeMap;
use thiserror::Error;

pub use mesh::build_mesh;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BodyError {
    #[error("invalid polygon {component}: {reason}")]
    InvalidPolygon { component: usize, reason: String },
    #[error("invalid resolution {0}")]
    InvalidResolution(f64),
    #[error("dirichlet edge ({0}, {1}) does not exist")]
    InvalidGamma(usize, usize),
}

/// Recovered second gradient at a node, indexed `[i][j][k]` = ∂_k ∂_j η_i.
pub type Hess = [[[f64; 2]; 2]; 2];

/// A directed boundary segment of the mesh, interior on the left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySegment {
    pub a: usize,
    pub b: usize,
    pub component: usize,
    /// Index of the polygon edge containing this segment.
    pub poly_edge: usize,
}

#[derive(Debug, Clone)]
pub struct ReferenceBody {
    /// Simple, counter-clockwise, pairwise disjoint polygons.
    pub components: Vec<Vec<V2>>,
    /// Dirichlet edges as (component, polygon edge) pairs.
    pub gamma: Vec<(usize, usize)>,
    pub resolution: f64,
    pub nodes: Vec<V2>,
    pub triangles: Vec<[usize; 3]>,
    pub segments: Vec<BoundarySegment>,
    /// Per component, boundary nodes in counter-clockwise order.
    pub loops: Vec<Vec<usize>>,
    pub node_component: Vec<usize>,
    /// For boundary nodes: the (incoming, outgoing) segment ids.
    pub node_segments: Vec<Option<(usize, usize)>>,
    /// For nodes sitting on a polygon vertex: that vertex index.
    pub node_vertex: Vec<Option<usize>>,
    pub gamma_node: Vec<bool>,
    pub areas: Vec<f64>,
    /// Shape function gradients per triangle, one per local vertex.
    pub shape_grads: Vec<[V2; 3]>,
    /// Lumped mass (area) per node.
    pub lumped: Vec<f64>,
    /// Lumped boundary length per node (zero for interior nodes).
    pub boundary_weight: Vec<f64>,
    /// Triangle owning each boundary segment.
    pub segment_triangle: Vec<usize>,
    hessian_op: Vec<Vec<(usize, [[f64; 2]; 2])>>,
}

impl ReferenceBody {
    pub(crate) fn assemble(
        components: Vec<Vec<V2>>,
        gamma: Vec<(usize, usize)>,
        resolution: f64,
        nodes: Vec<V2>,
        triangles: Vec<[usize; 3]>,
        node_component: Vec<usize>,
    ) -> Result<Self, BodyError> {
        for &(c, e) in &gamma {
            if c >= components.len() || e >= components[c].len() {
                return Err(BodyError::InvalidGamma(c, e));
            }
        }
        let n = nodes.len();
        let mut areas = Vec::with_capacity(triangles.len());
        let mut shape_grads = Vec::with_capacity(triangles.len());
        let mut lumped = vec![0.0; n];
        for t in &triangles {
            let (p0, p1, p2) = (nodes[t[0]], nodes[t[1]], nodes[t[2]]);
            let dm = M2::from_columns(&[p1 - p0, p2 - p0]);
            let area = 0.5 * dm.determinant();
            let inv = dm.try_inverse().expect("degenerate triangle");
            // rows of Dm^{-1} are the gradients of the barycentrics 1 and 2
            let g1 = V2::new(inv[(0, 0)], inv[(0, 1)]);
            let g2 = V2::new(inv[(1, 0)], inv[(1, 1)]);
            shape_grads.push([-g1 - g2, g1, g2]);
            areas.push(area);
            for &a in t {
                lumped[a] += area / 3.0;
            }
        }

        // boundary edges: directed edges whose reverse is absent
        let mut edge_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edge_count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut next: BTreeMap<usize, usize> = BTreeMap::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if edge_count[&(a.min(b), a.max(b))] == 1 {
                    next.insert(a, b);
                }
            }
        }
        let mut loops = vec![Vec::new(); components.len()];
        let mut segments = Vec::new();
        let mut node_segments = vec![None; n];
        let mut node_vertex = vec![None; n];
        let mut seen = vec![false; n];
        let mut incoming = vec![usize::MAX; n];
        let mut outgoing = vec![usize::MAX; n];
        for (&start, _) in next.iter() {
            if seen[start] {
                continue;
            }
            let c = node_component[start];
            let poly = &components[c];
            let mut cur = start;
            let mut lp = Vec::new();
            loop {
                seen[cur] = true;
                lp.push(cur);
                let nx = next[&cur];
                let mid = 0.5 * (nodes[cur] + nodes[nx]);
                let poly_edge = (0..poly.len())
                    .min_by(|&i, &j| {
                        let di = point_segment(&mid, &poly[i], &poly[(i + 1) % poly.len()]).0;
                        let dj = point_segment(&mid, &poly[j], &poly[(j + 1) % poly.len()]).0;
                        di.total_cmp(&dj)
                    })
                    .unwrap();
                outgoing[cur] = segments.len();
                incoming[nx] = segments.len();
                segments.push(BoundarySegment {
                    a: cur,
                    b: nx,
                    component: c,
                    poly_edge,
                });
                cur = nx;
                if cur == start {
                    break;
                }
            }
            // rotate so each loop starts at the node on polygon vertex 0
            if let Some(pos) = lp.iter().position(|&v| (nodes[v] - poly[0]).norm() < 1e-12) {
                lp.rotate_left(pos);
            }
            loops[c] = lp;
        }
        for v in 0..n {
            if outgoing[v] != usize::MAX {
                node_segments[v] = Some((incoming[v], outgoing[v]));
                let poly = &components[node_component[v]];
                node_vertex[v] = poly.iter().position(|p| (p - nodes[v]).norm() < 1e-12);
            }
        }
        let mut boundary_weight = vec![0.0; n];
        for s in &segments {
            let l = (nodes[s.b] - nodes[s.a]).norm();
            boundary_weight[s.a] += 0.5 * l;
            boundary_weight[s.b] += 0.5 * l;
        }
        let mut gamma_node = vec![false; n];
        for s in &segments {
            if gamma.contains(&(s.component, s.poly_edge)) {
                gamma_node[s.a] = true;
                gamma_node[s.b] = true;
            }
        }
        let mut body = ReferenceBody {
            components,
            gamma,
            resolution,
            nodes,
            triangles,
            segments,
            loops,
            node_component,
            node_segments,
            node_vertex,
            gamma_node,
            areas,
            shape_grads,
            lumped,
            boundary_weight,
            segment_triangle: Vec::new(),
            hessian_op: Vec::new(),
        };
        let around = body.node_triangles();
        body.segment_triangle = body
            .segments
            .iter()
            .map(|s| {
                *around[s.a]
                    .iter()
                    .find(|t| body.triangles[**t].contains(&s.b))
                    .expect("boundary segment belongs to a triangle")
            })
            .collect();
        body.hessian_op = body.build_hessian_operator();
        Ok(body)
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.node_segments[v].is_some()
    }

    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&v| self.is_boundary(v))
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    /// Diameter of the reference configuration.
    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = (V2::repeat(f64::INFINITY), V2::repeat(f64::NEG_INFINITY));
        for p in &self.nodes {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).norm()
    }

    /// Segment ids incident to node `v` (boundary nodes only).
    pub fn incident_segments(&self, v: usize) -> Option<(usize, usize)> {
        self.node_segments[v]
    }

    /// Triangles around each node.
    pub fn node_triangles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (t, tri) in self.triangles.iter().enumerate() {
            for &a in tri {
                out[a].push(t);
            }
        }
        out
    }

    /// Sparse linear map from nodal positions to recovered nodal Hessians:
    /// H_m[i][j][k] = Σ_a x_a[i] C_ma[j][k].
    fn build_hessian_operator(&self) -> Vec<Vec<(usize, [[f64; 2]; 2])>> {
        let n = self.nodes.len();
        let around = self.node_triangles();
        // D_n,a[j]: lumped L2 projection of the element gradient to node n
        let mut proj: Vec<BTreeMap<usize, V2>> = vec![BTreeMap::new(); n];
        for v in 0..n {
            let w: f64 = around[v].iter().map(|&t| self.areas[t]).sum();
            for &t in &around[v] {
                let f = self.areas[t] / w;
                for (l, &a) in self.triangles[t].iter().enumerate() {
                    *proj[v].entry(a).or_insert_with(V2::zeros) += self.shape_grads[t][l] * f;
                }
            }
        }
        let mut op = Vec::with_capacity(n);
        for m in 0..n {
            let w: f64 = around[m].iter().map(|&t| self.areas[t]).sum();
            let mut acc: BTreeMap<usize, [[f64; 2]; 2]> = BTreeMap::new();
            for &t in &around[m] {
                let f = self.areas[t] / w;
                for (l, &nn) in self.triangles[t].iter().enumerate() {
                    let gk = self.shape_grads[t][l];
                    for (&a, dj) in &proj[nn] {
                        let e = acc.entry(a).or_insert([[0.0; 2]; 2]);
                        for j in 0..2 {
                            for k in 0..2 {
                                e[j][k] += f * dj[j] * gk[k];
                            }
                        }
                    }
                }
            }
            op.push(acc.into_iter().collect());
        }
        op
    }

    /// Coefficients C_ma of the recovered Hessian at node m.
    pub fn hessian_stencil(&self, m: usize) -> &[(usize, [[f64; 2]; 2])] {
        &self.hessian_op[m]
    }

    /// Identity deformation.
    pub fn identity(&self) -> Deformation {
        interpolate_gradient_and_hessian(self, self.nodes.clone())
    }

    /// Outward unit normal of a reference segment.
    pub fn segment_normal(&self, s: usize) -> V2 {
        let seg = self.segments[s];
        -perp(&(self.nodes[seg.b] - self.nodes[seg.a])).normalize()
    }

    /// Node mirrored through the vertical line x = `axis`, if any.
    pub fn mirror_node(&self, v: usize, axis: f64) -> Option<usize> {
        let p = self.nodes[v];
        let q = V2::new(2.0 * axis - p.x, p.y);
        self.nodes.iter().position(|r| (r - q).norm() < 1e-9)
    }

    pub fn signed_area_of(&self, t: usize, pos: &[V2]) -> f64 {
        let tri = self.triangles[t];
        0.5 * cross(&(pos[tri[1]] - pos[tri[0]]), &(pos[tri[2]] - pos[tri[0]]))
    }
}

/// A half-plane wall {x : (x − point)·normal ≥ 0}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub point: V2,
    pub normal: V2,
}

/// The confining set Ω.
#[derive(Debug, Clone, PartialEq)]
pub enum Container {
    Unbounded,
    HalfPlanes(Vec<HalfPlane>),
    /// Simple counter-clockwise polygon.
    Polygon(Vec<V2>),
}

impl Container {
    /// Signed distance of a point to each wall; positive inside.
    pub fn wall_gaps(&self, x: &V2) -> Vec<(usize, f64, V2)> {
        match self {
            Container::Unbounded => vec![],
            Container::HalfPlanes(hs) => hs
                .iter()
                .enumerate()
                .map(|(i, h)| (i, (x - h.point).dot(&h.normal), h.normal))
                .collect(),
            Container::Polygon(p) => {
                let inside = crate::geom::point_in_polygon(x, p);
                (0..p.len())
                    .map(|i| {
                        let a = p[i];
                        let b = p[(i + 1) % p.len()];
                        let (d, t) = point_segment(x, &a, &b);
                        let foot = a + (b - a) * t;
                        let n = if d > 0.0 {
                            (x - foot) / d * if inside { 1.0 } else { -1.0 }
                        } else {
                            perp(&(b - a)).normalize()
                        };
                        (i, if inside { d } else { -d }, n)
                    })
                    .collect()
            }
        }
    }

    pub fn n_walls(&self) -> usize {
        match self {
            Container::Unbounded => 0,
            Container::HalfPlanes(h) => h.len(),
            Container::Polygon(p) => p.len(),
        }
    }

    /// Direction along wall `i`, with the container on its left.
    pub fn wall_direction(&self, i: usize) -> V2 {
        match self {
            Container::Unbounded => V2::zeros(),
            Container::HalfPlanes(h) => -perp(&h[i].normal),
            Container::Polygon(p) => (p[(i + 1) % p.len()] - p[i]).normalize(),
        }
    }
}

/// Nodal deformation with element gradients and recovered Hessians.
#[derive(Debug, Clone, PartialEq)]
pub struct Deformation {
    pub positions: Vec<V2>,
    pub grads: Vec<M2>,
    pub dets: Vec<f64>,
    pub hessian: Vec<Hess>,
}

impl Deformation {
    pub fn min_det(&self) -> f64 {
        self.dets.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest spectral norm of the element gradients.
    pub fn max_grad_norm(&self) -> f64 {
        self.grads
            .iter()
            .map(|g| g.singular_values().max())
            .fold(0.0, f64::max)
    }
}

pub fn element_gradient(body: &ReferenceBody, t: usize, pos: &[V2]) -> M2 {
    let tri = body.triangles[t];
    let g = &body.shape_grads[t];
    let mut f = M2::zeros();
    for l in 0..3 {
        f += pos[tri[l]] * g[l].transpose();
    }
    f
}

pub fn recovered_hessian(body: &ReferenceBody, m: usize, pos: &[V2]) -> Hess {
    let mut h = [[[0.0; 2]; 2]; 2];
    for (a, c) in body.hessian_stencil(m) {
        let x = pos[*a];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    h[i][j][k] += x[i] * c[j][k];
                }
            }
        }
    }
    h
}

/// Element gradients plus a recovered nodal second gradient: the element
/// gradients are projected to nodes with lumped L² weights, differentiated
/// per element, and the element values are averaged back to the nodes.
pub fn interpolate_gradient_and_hessian(body: &ReferenceBody, positions: Vec<V2>) -> Deformation {
    assert_eq!(positions.len(), body.n_nodes(), "one position per node");
    let grads: Vec<M2> = (0..body.triangles.len())
        .map(|t| element_gradient(body, t, &positions))
        .collect();
    let dets = grads.iter().map(|g| g.determinant()).collect();
    let hessian = (0..body.n_nodes())
        .map(|m| recovered_hessian(body, m, &positions))
        .collect();
    Deformation {
        positions,
        grads,
        dets,
        hessian,
    }
}

/// Nodal gradient from the lumped L² projection of element gradients.
pub fn recovered_nodal_gradients(body: &ReferenceBody, def: &Deformation) -> Vec<M2> {
    let mut acc = vec![M2::zeros(); body.n_nodes()];
    let mut w = vec![0.0; body.n_nodes()];
    for (t, tri) in body.triangles.iter().enumerate() {
        for &a in tri {
            acc[a] += def.grads[t] * body.areas[t];
            w[a] += body.areas[t];
        }
    }
    acc.iter().zip(w).map(|(g, w)| g / w).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::v2;

    fn unit_square(h: f64) -> ReferenceBody {
        build_mesh(
            &[vec![v2(0., 0.), v2(1., 0.), v2(1., 1.), v2(0., 1.)]],
            &[],
            h,
        )
        .unwrap()
    }

    #[test]
    fn identity_has_unit_gradient_and_zero_hessian() {
        let b = unit_square(0.25);
        let d = b.identity();
        for g in &d.grads {
            assert!((g - M2::identity()).norm() < 1e-13);
        }
        for h in &d.hessian {
            assert!(h.iter().flatten().flatten().all(|x| x.abs() < 1e-12));
        }
    }

    #[test]
    fn affine_maps_are_reproduced() {
        let b = unit_square(0.25);
        let f = M2::new(1.3, -0.2, 0.4, 0.9);
        let t = v2(0.7, -2.0);
        let d = interpolate_gradient_and_hessian(&b, b.nodes.iter().map(|p| f * p + t).collect());
        for g in &d.grads {
            assert!((g - f).norm() < 1e-12);
        }
        for h in &d.hessian {
            assert!(h.iter().flatten().flatten().all(|x| x.abs() < 1e-11));
        }
    }

    #[test]
    fn boundary_bookkeeping() {
        let b = unit_square(0.5);
        assert_eq!(b.segments.len(), 8);
        assert_eq!(b.loops[0].len(), 8);
        assert!((b.boundary_weight.iter().sum::<f64>() - 4.0).abs() < 1e-14);
        assert!((b.lumped.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let corners = b.node_vertex.iter().filter(|v| v.is_some()).count();
        assert_eq!(corners, 4);
    }

    #[test]
    fn wall_gaps_in_polygon_container() {
        let c = Container::Polygon(vec![v2(0., 0.), v2(2., 0.), v2(2., 2.), v2(0., 2.)]);
        let g = c.wall_gaps(&v2(0.5, 1.0));
        let min = g.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
        assert!((min - 0.5).abs() < 1e-14);
        let g = c.wall_gaps(&v2(-0.5, 1.0));
        assert!(g.iter().any(|x| x.1 < 0.0));
    }
}
