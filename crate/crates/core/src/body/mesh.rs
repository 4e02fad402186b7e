//! Deterministic triangulation of polygonal domains.
//!
//! Rectilinear polygons get a structured grid: the distinct vertex
//! coordinates cut the bounding box into blocks, each block interval is
//! split into ceil(len / h) equal pieces, cells whose centre lies inside
//! the polygon are kept, and each cell is split along a diagonal chosen by
//! the parity of its local (i + j). The unit square at h = 0.5 gives a 2×2
//! grid, 9 nodes and 8 triangles. Other polygons are ear-clipped and every
//! triangle is refined uniformly into k² children.

use super::{BodyError, ReferenceBody};
use crate::geom::{cross, is_simple, point_in_polygon, polygons_intersect, signed_area, V2};
use std::collections::BTreeMap;

pub fn build_mesh(
    polygons: &[Vec<V2>],
    gamma: &[(usize, usize)],
    resolution: f64,
) -> Result<ReferenceBody, BodyError> {
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(BodyError::InvalidResolution(resolution));
    }
    for (c, p) in polygons.iter().enumerate() {
        validate_polygon(c, p)?;
    }
    for i in 0..polygons.len() {
        for j in i + 1..polygons.len() {
            if polygons_intersect(&polygons[i], &polygons[j]) {
                return Err(BodyError::InvalidPolygon {
                    component: j,
                    reason: format!("overlaps component {i}"),
                });
            }
        }
    }
    let mut nodes = Vec::new();
    let mut triangles = Vec::new();
    let mut node_component = Vec::new();
    for (c, p) in polygons.iter().enumerate() {
        let (pn, pt) = if is_rectilinear(p) {
            grid_mesh(p, resolution)
        } else {
            clipped_mesh(p, resolution)
        };
        let off = nodes.len();
        node_component.extend(std::iter::repeat(c).take(pn.len()));
        nodes.extend(pn);
        triangles.extend(pt.into_iter().map(|t| [t[0] + off, t[1] + off, t[2] + off]));
    }
    ReferenceBody::assemble(
        polygons.to_vec(),
        gamma.to_vec(),
        resolution,
        nodes,
        triangles,
        node_component,
    )
}

fn validate_polygon(c: usize, p: &[V2]) -> Result<(), BodyError> {
    let bad = |reason: &str| BodyError::InvalidPolygon {
        component: c,
        reason: reason.to_string(),
    };
    if p.len() < 3 {
        return Err(bad("fewer than three vertices"));
    }
    if p.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
        return Err(bad("non-finite vertex"));
    }
    if !is_simple(p) {
        return Err(bad("self-intersecting"));
    }
    let a = signed_area(p);
    if a.abs() < 1e-12 {
        return Err(bad("zero area"));
    }
    if a < 0.0 {
        return Err(bad("clockwise orientation"));
    }
    Ok(())
}

fn is_rectilinear(p: &[V2]) -> bool {
    (0..p.len()).all(|i| {
        let d = p[(i + 1) % p.len()] - p[i];
        d.x == 0.0 || d.y == 0.0
    })
}

fn breakpoints(mut v: Vec<f64>, h: f64) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    let mut out = vec![v[0]];
    for w in v.windows(2) {
        let n = ((w[1] - w[0]) / h - 1e-9).ceil().max(1.0) as usize;
        for k in 1..=n {
            out.push(if k == n {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * k as f64 / n as f64
            });
        }
    }
    out
}

fn grid_mesh(p: &[V2], h: f64) -> (Vec<V2>, Vec<[usize; 3]>) {
    let xs = breakpoints(p.iter().map(|v| v.x).collect(), h);
    let ys = breakpoints(p.iter().map(|v| v.y).collect(), h);
    let (nx, ny) = (xs.len() - 1, ys.len() - 1);
    let keep = |i: usize, j: usize| {
        let c = V2::new(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
        point_in_polygon(&c, p)
    };
    let mut id = vec![usize::MAX; (nx + 1) * (ny + 1)];
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut used = vec![false; (nx + 1) * (ny + 1)];
    for j in 0..ny {
        for i in 0..nx {
            if keep(i, j) {
                for (a, b) in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                    used[idx(a, b)] = true;
                }
            }
        }
    }
    let mut nodes = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            if used[idx(i, j)] {
                id[idx(i, j)] = nodes.len();
                nodes.push(V2::new(xs[i], ys[j]));
            }
        }
    }
    let mut tris = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if !keep(i, j) {
                continue;
            }
            let (a, b, c, d) = (
                id[idx(i, j)],
                id[idx(i + 1, j)],
                id[idx(i + 1, j + 1)],
                id[idx(i, j + 1)],
            );
            if (i + j) % 2 == 0 {
                tris.push([a, b, c]);
                tris.push([a, c, d]);
            } else {
                tris.push([a, b, d]);
                tris.push([b, c, d]);
            }
        }
    }
    (nodes, tris)
}

fn ear_clip(p: &[V2]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..p.len()).collect();
    let mut out = Vec::new();
    let mut guard = 0;
    while idx.len() > 3 && guard < 10 * p.len() * p.len() {
        guard += 1;
        let n = idx.len();
        let mut clipped = false;
        for k in 0..n {
            let (i0, i1, i2) = (idx[(k + n - 1) % n], idx[k], idx[(k + 1) % n]);
            let (a, b, c) = (p[i0], p[i1], p[i2]);
            if cross(&(b - a), &(c - b)) <= 1e-14 {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                if j == i0 || j == i1 || j == i2 {
                    return false;
                }
                let q = p[j];
                cross(&(b - a), &(q - a)) >= 0.0
                    && cross(&(c - b), &(q - b)) >= 0.0
                    && cross(&(a - c), &(q - c)) >= 0.0
            });
            if blocked {
                continue;
            }
            out.push([i0, i1, i2]);
            idx.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            break;
        }
    }
    if idx.len() == 3 {
        out.push([idx[0], idx[1], idx[2]]);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Vertex(usize),
    Edge(usize, usize, usize),
    Inner(usize, usize, usize),
}

fn clipped_mesh(p: &[V2], h: f64) -> (Vec<V2>, Vec<[usize; 3]>) {
    let coarse = ear_clip(p);
    let longest = coarse
        .iter()
        .flat_map(|t| (0..3).map(move |k| (p[t[k]] - p[t[(k + 1) % 3]]).norm()))
        .fold(0.0, f64::max);
    let k = ((longest / h) - 1e-9).ceil().max(1.0) as usize;
    let mut ids: BTreeMap<Key, usize> = BTreeMap::new();
    let mut nodes = Vec::new();
    let mut point = |key: Key, pos: V2, nodes: &mut Vec<V2>| -> usize {
        *ids.entry(key).or_insert_with(|| {
            nodes.push(pos);
            nodes.len() - 1
        })
    };
    let mut tris = Vec::new();
    for (ti, t) in coarse.iter().enumerate() {
        // lattice point (i, j) with weights (k-i-j, i, j) on (t0, t1, t2)
        let mut lattice = |i: usize, j: usize, nodes: &mut Vec<V2>| -> usize {
            let l = k - i - j;
            let w = [(l, t[0]), (i, t[1]), (j, t[2])];
            let nz: Vec<(usize, usize)> = w.iter().copied().filter(|x| x.0 > 0).collect();
            match nz.len() {
                1 => point(Key::Vertex(nz[0].1), p[nz[0].1], nodes),
                2 => {
                    let (lo, hi) = if nz[0].1 < nz[1].1 {
                        (nz[0], nz[1])
                    } else {
                        (nz[1], nz[0])
                    };
                    let s = hi.0 as f64 / k as f64;
                    let pos = p[lo.1] + (p[hi.1] - p[lo.1]) * s;
                    point(Key::Edge(lo.1, hi.1, hi.0), pos, nodes)
                }
                _ => {
                    let pos = (p[t[0]] * l as f64 + p[t[1]] * i as f64 + p[t[2]] * j as f64)
                        / k as f64;
                    point(Key::Inner(ti, i, j), pos, nodes)
                }
            }
        };
        for j in 0..k {
            for i in 0..k - j {
                let a = lattice(i, j, &mut nodes);
                let b = lattice(i + 1, j, &mut nodes);
                let c = lattice(i, j + 1, &mut nodes);
                tris.push([a, b, c]);
                if i + j + 1 < k {
                    let d = lattice(i + 1, j + 1, &mut nodes);
                    tris.push([b, d, c]);
                }
            }
        }
    }
    (nodes, tris)
}
