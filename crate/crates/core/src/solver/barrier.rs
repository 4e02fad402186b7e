//! Distance barrier over node–segment and node–wall pairs, plus exact
//! time-of-impact bounds used to cap line-search steps.

use crate::body::{Container, ReferenceBody};
use crate::contact::ContactGeometry;
use crate::geom::{cross, point_segment, segments_cross, M2, V2};
use nalgebra::{SMatrix, SVector, SymmetricEigen};

/// β(z) = −(z − 1)² ln z on (0, 1), zero beyond.
pub fn beta(z: f64) -> f64 {
    if z >= 1.0 {
        0.0
    } else if z <= 0.0 {
        f64::INFINITY
    } else {
        -(z - 1.0).powi(2) * z.ln()
    }
}

pub fn beta_prime(z: f64) -> f64 {
    if z >= 1.0 {
        0.0
    } else {
        -2.0 * (z - 1.0) * z.ln() - (z - 1.0).powi(2) / z
    }
}

pub fn beta_second(z: f64) -> f64 {
    if z >= 1.0 {
        0.0
    } else {
        -2.0 * z.ln() - 2.0 * (z - 1.0) / z - (z * z - 1.0) / (z * z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierParams {
    pub kappa: f64,
    pub d_hat: f64,
}

/// Which nodes a pair acts on and with what weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pair {
    Wall { node: usize, wall: usize },
    Segment { node: usize, segment: usize },
}

/// Active pairs (distance below d̂) at the given positions.
pub fn active_pairs(
    body: &ReferenceBody,
    geometry: &ContactGeometry,
    container: &Container,
    pos: &[V2],
    d_hat: f64,
) -> Vec<Pair> {
    let mut out = Vec::new();
    for v in body.boundary_nodes() {
        for (w, gap, _) in container.wall_gaps(&pos[v]) {
            if gap < d_hat {
                out.push(Pair::Wall { node: v, wall: w });
            }
        }
        for &s in &geometry.candidates[v] {
            let seg = body.segments[s];
            if point_segment(&pos[v], &pos[seg.a], &pos[seg.b]).0 < d_hat {
                out.push(Pair::Segment { node: v, segment: s });
            }
        }
    }
    out
}

fn wall_gap(container: &Container, w: usize, x: &V2) -> (f64, V2) {
    let g = container.wall_gaps(x);
    (g[w].1, g[w].2)
}

/// Barrier energy of one pair.
pub fn pair_energy(
    body: &ReferenceBody,
    container: &Container,
    pos: &[V2],
    pair: &Pair,
    p: &BarrierParams,
) -> f64 {
    match *pair {
        Pair::Wall { node, wall } => {
            let (d, _) = wall_gap(container, wall, &pos[node]);
            p.kappa * body.boundary_weight[node] * beta(d / p.d_hat)
        }
        Pair::Segment { node, segment } => {
            let s = body.segments[segment];
            let (d, _) = point_segment(&pos[node], &pos[s.a], &pos[s.b]);
            p.kappa * body.boundary_weight[node] * beta(d / p.d_hat)
        }
    }
}

/// Nodes touched by a pair, in the order used by `pair_gradient`.
pub fn pair_nodes(body: &ReferenceBody, pair: &Pair) -> Vec<usize> {
    match *pair {
        Pair::Wall { node, .. } => vec![node],
        Pair::Segment { node, segment } => {
            let s = body.segments[segment];
            vec![node, s.a, s.b]
        }
    }
}

fn segment_pair_grad(x: &V2, a: &V2, b: &V2, w: f64, p: &BarrierParams) -> [V2; 3] {
    let (d, t) = point_segment(x, a, b);
    let c = a + (b - a) * t;
    let n = (x - c) / d;
    let s = w * p.kappa * beta_prime(d / p.d_hat) / p.d_hat;
    [n * s, -n * (s * (1.0 - t)), -n * (s * t)]
}

/// Gradient of a pair energy with respect to the nodes of `pair_nodes`.
pub fn pair_gradient(
    body: &ReferenceBody,
    container: &Container,
    pos: &[V2],
    pair: &Pair,
    p: &BarrierParams,
) -> Vec<V2> {
    match *pair {
        Pair::Wall { node, wall } => {
            let (d, n) = wall_gap(container, wall, &pos[node]);
            let s = p.kappa * body.boundary_weight[node] * beta_prime(d / p.d_hat) / p.d_hat;
            vec![n * s]
        }
        Pair::Segment { node, segment } => {
            let s = body.segments[segment];
            segment_pair_grad(&pos[node], &pos[s.a], &pos[s.b], body.boundary_weight[node], p).to_vec()
        }
    }
}

/// Positive semidefinite pair Hessian. Wall pairs are exact (the gap is
/// affine); segment pairs differentiate the analytic gradient centrally
/// and project the 6×6 block onto the PSD cone.
pub fn pair_hessian(
    body: &ReferenceBody,
    container: &Container,
    pos: &[V2],
    pair: &Pair,
    p: &BarrierParams,
) -> Vec<f64> {
    match *pair {
        Pair::Wall { node, wall } => {
            let (d, n) = wall_gap(container, wall, &pos[node]);
            let s = p.kappa * body.boundary_weight[node] * beta_second(d / p.d_hat) / (p.d_hat * p.d_hat);
            let m: M2 = n * n.transpose() * s.max(0.0);
            vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]]
        }
        Pair::Segment { node, segment } => {
            let sg = body.segments[segment];
            let w = body.boundary_weight[node];
            let mut y = [pos[node], pos[sg.a], pos[sg.b]];
            let d = point_segment(&y[0], &y[1], &y[2]).0;
            let eps = 1e-4 * d;
            let mut h = SMatrix::<f64, 6, 6>::zeros();
            for c in 0..6 {
                let orig = y[c / 2][c % 2];
                y[c / 2][c % 2] = orig + eps;
                let gp = segment_pair_grad(&y[0], &y[1], &y[2], w, p);
                y[c / 2][c % 2] = orig - eps;
                let gm = segment_pair_grad(&y[0], &y[1], &y[2], w, p);
                y[c / 2][c % 2] = orig;
                for r in 0..6 {
                    h[(r, c)] = (gp[r / 2][r % 2] - gm[r / 2][r % 2]) / (2.0 * eps);
                }
            }
            let h = (h + h.transpose()) * 0.5;
            let e = SymmetricEigen::new(h);
            let vals: SVector<f64, 6> = e.eigenvalues.map(|l| l.max(0.0));
            let h = e.eigenvectors * SMatrix::<f64, 6, 6>::from_diagonal(&vals) * e.eigenvectors.transpose();
            h.iter().copied().collect::<Vec<_>>()
        }
    }
}

/// Total barrier energy at `pos`.
pub fn barrier_energy(
    body: &ReferenceBody,
    geometry: &ContactGeometry,
    container: &Container,
    pos: &[V2],
    p: &BarrierParams,
) -> f64 {
    active_pairs(body, geometry, container, pos, p.d_hat)
        .iter()
        .map(|q| pair_energy(body, container, pos, q, p))
        .sum()
}

/// Barrier gradient split into the wall part and the self-contact part.
pub fn barrier_gradient(
    body: &ReferenceBody,
    geometry: &ContactGeometry,
    container: &Container,
    pos: &[V2],
    p: &BarrierParams,
) -> (Vec<V2>, Vec<V2>) {
    let n = body.n_nodes();
    let mut wall = vec![V2::zeros(); n];
    let mut own = vec![V2::zeros(); n];
    for q in active_pairs(body, geometry, container, pos, p.d_hat) {
        let g = pair_gradient(body, container, pos, &q, p);
        let target = if matches!(q, Pair::Wall { .. }) { &mut wall } else { &mut own };
        for (v, gv) in pair_nodes(body, &q).into_iter().zip(g) {
            target[v] += gv;
        }
    }
    (wall, own)
}

/// Roots of c0 + c1 s + c2 s² in (0, limit], ascending.
fn roots_in(c0: f64, c1: f64, c2: f64, limit: f64) -> Vec<f64> {
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    if scale == 0.0 {
        return vec![];
    }
    let mut roots = Vec::new();
    if c2.abs() <= 1e-14 * scale {
        if c1 != 0.0 {
            roots.push(-c0 / c1);
        }
    } else {
        let disc = c1 * c1 - 4.0 * c2 * c0;
        if disc >= 0.0 {
            let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
            if q != 0.0 {
                roots.push(q / c2);
                roots.push(c0 / q);
            } else {
                roots.push(0.0);
            }
        }
    }
    roots.retain(|&s| s > 0.0 && s <= limit);
    roots.sort_by(f64::total_cmp);
    roots
}

fn first_root(c0: f64, c1: f64, c2: f64, limit: f64) -> Option<f64> {
    roots_in(c0, c1, c2, limit).first().copied()
}

/// Largest fraction of the step `dir` that keeps every element
/// orientation-preserving and every node off the walls and off its
/// candidate segments, scaled by `safety`. Returns 1 when no impact occurs.
pub fn step_cap(
    body: &ReferenceBody,
    geometry: &ContactGeometry,
    container: &Container,
    pos: &[V2],
    dir: &[V2],
    safety: f64,
) -> f64 {
    let mut toi: f64 = 1.0;
    for tri in &body.triangles {
        let e1 = pos[tri[1]] - pos[tri[0]];
        let e2 = pos[tri[2]] - pos[tri[0]];
        let d1 = dir[tri[1]] - dir[tri[0]];
        let d2 = dir[tri[2]] - dir[tri[0]];
        let c0 = cross(&e1, &e2);
        let c1 = cross(&e1, &d2) + cross(&d1, &e2);
        let c2 = cross(&d1, &d2);
        if let Some(s) = first_root(c0, c1, c2, toi) {
            toi = toi.min(s);
        }
    }
    for v in body.boundary_nodes() {
        for (_, gap, n) in container.wall_gaps(&pos[v]) {
            let rate = dir[v].dot(&n);
            if rate < 0.0 && gap > 0.0 {
                toi = toi.min(gap / -rate);
            }
        }
        let reach_v = dir[v].norm();
        for &s in &geometry.candidates[v] {
            let seg = body.segments[s];
            let (d0, _) = point_segment(&pos[v], &pos[seg.a], &pos[seg.b]);
            let reach = reach_v + dir[seg.a].norm().max(dir[seg.b].norm());
            if d0 > reach * toi {
                continue;
            }
            // collinearity of x(s) with the moving segment
            let (x, a, b) = (pos[v], pos[seg.a], pos[seg.b]);
            let (dx, da, db) = (dir[v], dir[seg.a], dir[seg.b]);
            let e = b - a;
            let de = db - da;
            let r = x - a;
            let dr = dx - da;
            let c0 = cross(&e, &r);
            let c1 = cross(&e, &dr) + cross(&de, &r);
            let c2 = cross(&de, &dr);
            for r in roots_in(c0, c1, c2, toi) {
                let (dd, _) = point_segment(&(x + dx * r), &(a + da * r), &(b + db * r));
                if dd <= 1e-12 * (1.0 + e.norm()) {
                    toi = toi.min(r);
                    break;
                }
            }
        }
    }
    if toi >= 1.0 {
        1.0
    } else {
        safety * toi
    }
}

/// Whether any two non-adjacent boundary segments cross.
pub fn boundary_crossing(body: &ReferenceBody, pos: &[V2]) -> bool {
    let segs = &body.segments;
    for i in 0..segs.len() {
        let (a, b) = (segs[i].a, segs[i].b);
        for s in &segs[i + 1..] {
            if s.a == a || s.a == b || s.b == a || s.b == b {
                continue;
            }
            if segments_cross(&pos[a], &pos[b], &pos[s.a], &pos[s.b]) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_derivatives_match_differences() {
        for z in [0.05, 0.3, 0.7, 0.99] {
            let e = 1e-6;
            let fd1 = (beta(z + e) - beta(z - e)) / (2.0 * e);
            let fd2 = (beta_prime(z + e) - beta_prime(z - e)) / (2.0 * e);
            assert!((fd1 - beta_prime(z)).abs() < 1e-6 * (1.0 + fd1.abs()));
            assert!((fd2 - beta_second(z)).abs() < 1e-5 * (1.0 + fd2.abs()));
        }
        assert_eq!(beta(1.0), 0.0);
        assert_eq!(beta_prime(1.5), 0.0);
    }

    #[test]
    fn roots() {
        assert_eq!(first_root(1.0, -1.0, 0.0, 2.0), Some(1.0));
        let r = first_root(2.0, -3.0, 1.0, 5.0).unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        assert_eq!(first_root(1.0, 1.0, 0.0, 5.0), None);
    }
}
