//! Small planar geometry kit shared by the other modules.

use nalgebra::{Matrix2, Vector2};
use std::f64::consts::TAU;

pub type V2 = Vector2<f64>;
pub type M2 = Matrix2<f64>;

#[inline]
pub fn v2(x: f64, y: f64) -> V2 {
    V2::new(x, y)
}

#[inline]
pub fn cross(a: &V2, b: &V2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Rotate by +90 degrees.
#[inline]
pub fn perp(a: &V2) -> V2 {
    V2::new(-a.y, a.x)
}

/// Cofactor matrix, so that `F * cof(F)^T = det(F) I`.
#[inline]
pub fn cof(f: &M2) -> M2 {
    M2::new(f[(1, 1)], -f[(1, 0)], -f[(0, 1)], f[(0, 0)])
}

/// Angle wrapped into [0, 2π).
#[inline]
pub fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[inline]
pub fn angle_of(v: &V2) -> f64 {
    wrap(v.y.atan2(v.x))
}

#[inline]
pub fn unit_at(angle: f64) -> V2 {
    V2::new(angle.cos(), angle.sin())
}

/// Distance from `p` to segment `ab` and the segment parameter of the foot point.
pub fn point_segment(p: &V2, a: &V2, b: &V2) -> (f64, f64) {
    let d = b - a;
    let l2 = d.norm_squared();
    let t = if l2 > 0.0 {
        ((p - a).dot(&d) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    ((a + d * t - p).norm(), t)
}

fn orient(a: &V2, b: &V2, c: &V2) -> f64 {
    cross(&(b - a), &(c - a))
}

fn on_segment(a: &V2, b: &V2, p: &V2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed segment intersection test (touching counts).
pub fn segments_intersect(a: &V2, b: &V2, c: &V2, d: &V2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Proper crossing: the open segments cross at a single interior point.
pub fn segments_cross(a: &V2, b: &V2, c: &V2, d: &V2) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Distance between two closed segments.
pub fn segment_segment(a: &V2, b: &V2, c: &V2, d: &V2) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment(a, c, d)
        .0
        .min(point_segment(b, c, d).0)
        .min(point_segment(c, a, b).0)
        .min(point_segment(d, a, b).0)
}

pub fn signed_area(poly: &[V2]) -> f64 {
    let n = poly.len();
    let mut s = 0.0;
    for i in 0..n {
        s += cross(&poly[i], &poly[(i + 1) % n]);
    }
    0.5 * s
}

/// Even-odd point in polygon.
pub fn point_in_polygon(p: &V2, poly: &[V2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// True when no two non-adjacent edges touch and no adjacent edges fold back.
pub fn is_simple(poly: &[V2]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        if (poly[(i + 1) % n] - poly[i]).norm() == 0.0 {
            return false;
        }
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // adjacent edges share one vertex; reject collinear overlap
                let shared = if j == i + 1 { b } else { a };
                let other_i = if j == i + 1 { a } else { b };
                let other_j = if j == i + 1 { d } else { c };
                let u = other_i - shared;
                let w = other_j - shared;
                if cross(&u, &w).abs() <= 1e-14 * u.norm() * w.norm() && u.dot(&w) > 0.0 {
                    return false;
                }
                continue;
            }
            if segments_intersect(&a, &b, &c, &d) {
                return false;
            }
        }
    }
    true
}

pub fn polygons_intersect(p: &[V2], q: &[V2]) -> bool {
    for i in 0..p.len() {
        for j in 0..q.len() {
            if segments_intersect(&p[i], &p[(i + 1) % p.len()], &q[j], &q[(j + 1) % q.len()]) {
                return true;
            }
        }
    }
    point_in_polygon(&p[0], q) || point_in_polygon(&q[0], p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cof_identity() {
        let f = M2::new(1.0, 2.0, 3.0, 5.0);
        let lhs = f * cof(&f).transpose();
        assert!((lhs - M2::identity() * f.determinant()).norm() < 1e-14);
    }

    #[test]
    fn bowtie_not_simple() {
        let bow = [v2(0., 0.), v2(1., 1.), v2(1., 0.), v2(0., 1.)];
        assert!(!is_simple(&bow));
        let sq = [v2(0., 0.), v2(1., 0.), v2(1., 1.), v2(0., 1.)];
        assert!(is_simple(&sq));
        assert!((signed_area(&sq) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn segment_distance() {
        let (d, t) = point_segment(&v2(0.5, 1.0), &v2(0., 0.), &v2(1., 0.));
        assert!((d - 1.0).abs() < 1e-15 && (t - 0.5).abs() < 1e-15);
        assert!(segments_cross(&v2(0., 0.), &v2(1., 1.), &v2(0., 1.), &v2(1., 0.)));
        assert!(!segments_cross(&v2(0., 0.), &v2(1., 0.), &v2(1., 0.), &v2(2., 1.)));
    }
}
