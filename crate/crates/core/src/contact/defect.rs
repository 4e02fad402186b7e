//! Area of the deformed image versus ∫ det ∇η.

use super::ContactError;
use crate::body::{Deformation, ReferenceBody};
use crate::geom::{cross, segments_cross, V2};

fn crossing_x(a: &V2, b: &V2, c: &V2, d: &V2) -> f64 {
    let r = b - a;
    let s = d - c;
    let t = cross(&(c - a), &s) / cross(&r, &s);
    a.x + t * r.x
}

/// Exact area of a union of triangles.
///
/// Vertical lines through every vertex and every edge crossing cut the
/// plane into slabs in which no two edges cross, so the length of the
/// union's cross-section is affine in x inside a slab. The midpoint rule
/// is therefore exact per slab.
pub fn union_area(tris: &[[V2; 3]]) -> f64 {
    let mut edges: Vec<(V2, V2)> = Vec::with_capacity(3 * tris.len());
    let mut xs: Vec<f64> = Vec::with_capacity(3 * tris.len());
    for t in tris {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            xs.push(a.x);
            edges.push(if a.x <= b.x { (a, b) } else { (b, a) });
        }
    }
    edges.sort_by(|p, q| p.0.x.total_cmp(&q.0.x));
    for i in 0..edges.len() {
        let (a, b) = edges[i];
        for &(c, d) in &edges[i + 1..] {
            if c.x > b.x {
                break;
            }
            if segments_cross(&a, &b, &c, &d) {
                xs.push(crossing_x(&a, &b, &c, &d));
            }
        }
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();

    let spans: Vec<(f64, f64)> = tris
        .iter()
        .map(|t| {
            let lo = t.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
            let hi = t.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let mut area = 0.0;
    let mut iv: Vec<(f64, f64)> = Vec::new();
    for w in xs.windows(2) {
        let width = w[1] - w[0];
        if width <= 0.0 {
            continue;
        }
        let xm = 0.5 * (w[0] + w[1]);
        iv.clear();
        for (t, &(lo, hi)) in tris.iter().zip(&spans) {
            if !(lo < xm && xm < hi) {
                continue;
            }
            let mut ylo = f64::INFINITY;
            let mut yhi = f64::NEG_INFINITY;
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if (a.x - xm) * (b.x - xm) < 0.0 {
                    let y = a.y + (xm - a.x) / (b.x - a.x) * (b.y - a.y);
                    ylo = ylo.min(y);
                    yhi = yhi.max(y);
                }
            }
            if yhi > ylo {
                iv.push((ylo, yhi));
            }
        }
        iv.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut len = 0.0;
        let mut cur: Option<(f64, f64)> = None;
        for &(a, b) in &iv {
            match cur {
                Some((c0, c1)) if a <= c1 => cur = Some((c0, c1.max(b))),
                Some((c0, c1)) => {
                    len += c1 - c0;
                    cur = Some((a, b));
                }
                None => cur = Some((a, b)),
            }
        }
        if let Some((c0, c1)) = cur {
            len += c1 - c0;
        }
        area += len * width;
    }
    area
}

/// ∫ det ∇η − |η(Q)|, clamped at zero against round-off.
pub fn ciarlet_necas_defect(body: &ReferenceBody, def: &Deformation) -> Result<f64, ContactError> {
    if let Some(t) = def.dets.iter().position(|&d| !(d > 0.0)) {
        return Err(ContactError::DegenerateElement(t));
    }
    let tris: Vec<[V2; 3]> = body
        .triangles
        .iter()
        .map(|t| [def.positions[t[0]], def.positions[t[1]], def.positions[t[2]]])
        .collect();
    let integral: f64 = def.dets.iter().zip(&body.areas).map(|(d, a)| d * a).sum();
    Ok((integral - union_area(&tris)).max(0.0))
}

/// Whether the open interiors of two triangles intersect (separating axis
/// test; touching along an edge or at a point does not count).
pub fn triangles_overlap(a: &[V2; 3], b: &[V2; 3]) -> bool {
    let scale = a
        .iter()
        .chain(b.iter())
        .map(|p| p.norm())
        .fold(1.0, f64::max);
    let eps = 1e-12 * scale;
    for tri in [a, b] {
        for k in 0..3 {
            let e = tri[(k + 1) % 3] - tri[k];
            let n = V2::new(-e.y, e.x);
            let n = n / n.norm();
            let pa = a.iter().map(|p| p.dot(&n));
            let pb = b.iter().map(|p| p.dot(&n));
            let (alo, ahi) = pa.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
            let (blo, bhi) = pb.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
            if ahi <= blo + eps || bhi <= alo + eps {
                return false;
            }
        }
    }
    true
}
