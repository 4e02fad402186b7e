//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use corner_contact::body::io::ScenarioConfig;
use corner_contact::body::{build_mesh, interpolate_gradient_and_hessian};
use corner_contact::cones::{
    polar_cone, push_forward_normal, push_forward_tangent, regular_tangent_cone_polys,
    tangent_cone_polys, CornerDescriptor, PolyCone,
};
use corner_contact::contact::{admissible_direction_check, contact_set, ContactKind};
use corner_contact::geom::{angle_of, cof, point_in_polygon, unit_at, M2, V2};
use corner_contact::harness::{builtin, BUILTIN_NAMES};
use corner_contact::material::{
    dissipation, dissipation_gradient, energy, energy_gradient, MaterialParams,
};
use corner_contact::solver::{quasistatic_solve, time_delayed_solve, Model, SolveOutput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::Instant;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Signed angle difference folded into (-π, π].
fn dang(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// Endpoint residual between two single-arc cones.
fn arc_residual(a: &PolyCone, b: &PolyCone) -> f64 {
    match (a.arcs(), b.arcs()) {
        ([x], [y]) => dang(x.start, y.start).abs().max((x.width - y.width).abs()),
        ([], []) => 0.0,
        _ => f64::INFINITY,
    }
}

fn random_convex(rng: &mut ChaCha8Rng) -> PolyCone {
    PolyCone::arc(rng.random_range(0.0..TAU), rng.random_range(0.05..PI - 0.05))
}

fn random_gradient(rng: &mut ChaCha8Rng) -> M2 {
    let th: f64 = rng.random_range(0.0..TAU);
    let r = M2::new(th.cos(), -th.sin(), th.sin(), th.cos());
    let d = M2::new(rng.random_range(0.3..3.0), 0.0, 0.0, rng.random_range(0.3..3.0));
    let s = M2::new(1.0, rng.random_range(-1.5..1.5), 0.0, 1.0);
    r * d * s
}

/// Random star-shaped polygon, counter-clockwise.
fn random_polygon(rng: &mut ChaCha8Rng) -> Vec<V2> {
    let n = rng.random_range(5..10);
    (0..n)
        .map(|k| {
            let a = TAU * (k as f64 + rng.random_range(0.1..0.9)) / n as f64;
            unit_at(a) * rng.random_range(0.5..1.5)
        })
        .collect()
}

/// Outward normal of the edge a → b of a counter-clockwise polygon.
fn outward(a: &V2, b: &V2) -> V2 {
    let d = (b - a).normalize();
    V2::new(d.y, -d.x)
}

/// Sector swept counter-clockwise from `u` to `w` (short way).
fn short_sector(u: &V2, w: &V2) -> PolyCone {
    let s = angle_of(u);
    let mut width = (angle_of(w) - s).rem_euclid(TAU);
    let mut start = s;
    if width > PI {
        start = angle_of(w);
        width = TAU - width;
    }
    PolyCone::arc(start, width)
}

fn criterion_1() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = [0.0f64; 5];
    let mut oracle_misses = 0;
    for _ in 0..200 {
        let c = random_convex(&mut rng);
        // polar involution
        worst[0] = worst[0].max(arc_residual(&polar_cone(&polar_cone(&c)), &c));
        // transformation law, both sides against the image of the bounding rays
        let f = random_gradient(&mut rng);
        let a = c.arcs()[0];
        let ft = push_forward_tangent(&c, &f).unwrap();
        let oracle_t = short_sector(&(f * unit_at(a.start)), &(f * unit_at(a.end())));
        worst[1] = worst[1].max(arc_residual(&ft, &oracle_t));
        let fn_ = push_forward_normal(&polar_cone(&c), &f).unwrap();
        let p = polar_cone(&c).arcs()[0];
        let oracle_n = short_sector(&(cof(&f) * unit_at(p.start)), &(cof(&f) * unit_at(p.end())));
        worst[2] = worst[2].max(arc_residual(&fn_, &oracle_n));
        worst[2] = worst[2].max(arc_residual(&fn_, &polar_cone(&ft)));
        // corners of a random polygon: T̂ ⊆ T, N̂ = cone of the outward normals
        let poly = random_polygon(&mut rng);
        let n = poly.len();
        for i in 0..n {
            let (prev, x, next) = (poly[(i + n - 1) % n], poly[i], poly[(i + 1) % n]);
            let polys = vec![poly.clone()];
            let t = tangent_cone_polys(&polys, &x).unwrap();
            let th = regular_tangent_cone_polys(&polys, &x).unwrap();
            for k in 0..32 {
                let a = th.arcs()[0];
                let v = unit_at(a.start + a.width * (k as f64 + 0.5) / 32.0);
                worst[3] = worst[3].max(-t.angular_margin(&v));
            }
            let nh = polar_cone(&th);
            let oracle = short_sector(&outward(&prev, &x), &outward(&x, &next));
            worst[4] = worst[4].max(arc_residual(&nh, &oracle));
            // T by its definition: x + εv stays in the polygon
            for k in 0..24 {
                let v = unit_at(TAU * (k as f64 + 0.37) / 24.0);
                let m = t.angular_margin(&v);
                if m.abs() < 1e-4 {
                    continue;
                }
                if (m > 0.0) != point_in_polygon(&(x + v * 1e-7), &poly) {
                    oracle_misses += 1;
                }
            }
        }
    }
    let max = worst.iter().copied().fold(0.0, f64::max);
    verdict(
        max < 1e-9 && oracle_misses == 0,
        format!(
            "200 trials: polar involution {:.1e}, F T {:.1e}, cof F N {:.1e}, T̂⊆T {:.1e}, N̂=(T̂)* {:.1e}, sampled T misses {}",
            worst[0], worst[1], worst[2], worst[3], worst[4], oracle_misses
        ),
    )
}

/// Liminf oracle for T̂ at vertex `i`: v belongs if x' + εv stays inside
/// for every boundary point x' near x.
fn sampled_regular_tangent(poly: &[V2], i: usize, v: &V2) -> bool {
    let n = poly.len();
    let x = poly[i];
    let mut pts = vec![x];
    for nb in [poly[(i + n - 1) % n], poly[(i + 1) % n]] {
        for k in 1..=20 {
            pts.push(x + (nb - x) * (k as f64 * 1e-4));
        }
    }
    pts.iter().all(|p| point_in_polygon(&(p + v * 1e-7), poly) || {
        // a point exactly on the boundary counts as inside
        let q = p + v * 1e-7;
        (0..n).any(|j| corner_contact::geom::point_segment(&q, &poly[j], &poly[(j + 1) % n]).0 < 1e-12)
    })
}

fn criterion_2() -> Verdict {
    let square = vec![V2::new(0.0, 0.0), V2::new(1.0, 0.0), V2::new(1.0, 1.0), V2::new(0.0, 1.0)];
    let l = vec![
        V2::new(0.0, 0.0),
        V2::new(2.0, 0.0),
        V2::new(2.0, 1.0),
        V2::new(1.0, 1.0),
        V2::new(1.0, 2.0),
        V2::new(0.0, 2.0),
    ];
    let q = FRAC_PI_2;
    // (polygon, vertex, expected T, T̂, N̂)
    let fixtures = [
        (&square, 0, PolyCone::arc(0.0, q), PolyCone::arc(0.0, q), PolyCone::arc(PI, q)),
        (&l, 3, PolyCone::arc(q, 3.0 * q), PolyCone::arc(PI, q), PolyCone::arc(0.0, q)),
    ];
    let mut worst: f64 = 0.0;
    let mut misses = 0;
    for (poly, i, t_exp, th_exp, nh_exp) in &fixtures {
        let polys = vec![(*poly).clone()];
        let x = poly[*i];
        let t = tangent_cone_polys(&polys, &x).unwrap();
        let th = regular_tangent_cone_polys(&polys, &x).unwrap();
        let nh = polar_cone(&th);
        worst = worst.max(arc_residual(&t, t_exp)).max(arc_residual(&th, th_exp)).max(arc_residual(&nh, nh_exp));
        let c = CornerDescriptor::new(&poly[(i + poly.len() - 1) % poly.len()], &x, &poly[(i + 1) % poly.len()]);
        worst = worst.max(arc_residual(&c.regular_tangent(), th_exp));
        // sampled oracles away from the bounding rays
        let dirs: Vec<V2> = (0..720).map(|k| unit_at(TAU * (k as f64 + 0.5) / 720.0)).collect();
        let in_th: Vec<V2> = dirs.iter().filter(|v| sampled_regular_tangent(poly, *i, v)).copied().collect();
        for v in &dirs {
            if t.angular_margin(v).abs() > 1e-3 && (t.angular_margin(v) > 0.0) != point_in_polygon(&(x + v * 1e-7), poly) {
                misses += 1;
            }
            if th.angular_margin(v).abs() > 1e-3 && (th.angular_margin(v) > 0.0) != in_th.contains(v) {
                misses += 1;
            }
            // polar oracle: w·v ≤ 0 for every sampled v in T̂
            let polar_ok = in_th.iter().all(|u| u.dot(v) <= 1e-12);
            if nh.angular_margin(v).abs() > 1e-2 && (nh.angular_margin(v) > 0.0) != polar_ok {
                misses += 1;
            }
        }
    }
    verdict(worst < 1e-12 && misses == 0, format!("fixture residual {worst:.1e}, sampled oracle disagreements {misses}"))
}

fn criterion_3() -> Verdict {
    let poly = vec![vec![
        V2::new(0.0, 0.0),
        V2::new(2.0, 0.0),
        V2::new(2.0, 1.0),
        V2::new(1.0, 1.0),
        V2::new(1.0, 2.0),
        V2::new(0.0, 2.0),
    ]];
    let body = build_mesh(&poly, &[], 0.5).unwrap();
    let params = MaterialParams::stress_free(1.0, 4.0, 1e-2, 4.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut de, mut dr, mut hom, mut euler) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut states = 0;
    while states < 20 {
        let pos: Vec<V2> = body
            .nodes
            .iter()
            .map(|p| p + V2::new(rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05)))
            .collect();
        let def = interpolate_gradient_and_hessian(&body, pos.clone());
        if def.min_det() <= 0.2 {
            continue;
        }
        states += 1;
        let b: Vec<V2> = (0..body.n_nodes()).map(|_| V2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let g = energy_gradient(&params, &body, &def).unwrap();
        let gr = dissipation_gradient(&params, &body, &def, &b);
        let e = 1e-6;
        let (mut num, mut den, mut num_r, mut den_r) = (0.0, 0.0, 0.0, 0.0);
        for v in 0..body.n_nodes() {
            for k in 0..2 {
                let shifted = |s: f64| {
                    let mut p = pos.clone();
                    p[v][k] += s;
                    energy(&params, &body, &interpolate_gradient_and_hessian(&body, p))
                };
                let fd = (shifted(e) - shifted(-e)) / (2.0 * e);
                num += (fd - g[v][k]).powi(2);
                den += g[v][k].powi(2);
                let rb = |s: f64| {
                    let mut bb = b.clone();
                    bb[v][k] += s;
                    dissipation(&params, &body, &def, &bb)
                };
                let fdr = (rb(e) - rb(-e)) / (2.0 * e);
                num_r += (fdr - gr[v][k]).powi(2);
                den_r += gr[v][k].powi(2);
            }
        }
        de = de.max((num / den).sqrt());
        dr = dr.max((num_r / den_r).sqrt());
        let r = dissipation(&params, &body, &def, &b);
        let lam = rng.random_range(0.1..5.0);
        let bl: Vec<V2> = b.iter().map(|x| x * lam).collect();
        hom = hom.max((dissipation(&params, &body, &def, &bl) - lam * lam * r).abs() / (lam * lam * r));
        let pairing: f64 = gr.iter().zip(&b).map(|(a, x)| a.dot(x)).sum();
        euler = euler.max((pairing - 2.0 * r).abs() / (2.0 * r));
    }
    verdict(
        de < 1e-5 && dr < 1e-5 && hom < 1e-12 && euler < 1e-10,
        format!("20 states: DE {de:.1e}, D2R {dr:.1e}, homogeneity {hom:.1e}, Euler {euler:.1e}"),
    )
}

fn solve(cfg: &ScenarioConfig) -> SolveOutput {
    let out = if cfg.mode == "inertial" { time_delayed_solve(cfg) } else { quasistatic_solve(cfg) };
    out.unwrap_or_else(|e| panic!("{} failed: {e}", cfg.name))
}

fn energy_tol(out: &SolveOutput) -> f64 {
    1e-6 * (out.trace[0].energy + out.trace[0].kinetic + 1.0)
}

fn criterion_4(squeeze: &SolveOutput) -> Verdict {
    let descent_bad = squeeze.diagnostics.iter().filter(|d| !(d.j_new <= d.j_prev)).count();
    let tol = energy_tol(squeeze);
    let worst = squeeze.trace.iter().skip(1).map(|r| r.slack_qs).fold(f64::INFINITY, f64::min);
    let steps = squeeze.diagnostics.len();
    let elements = squeeze.model.body.triangles.len();
    verdict(
        descent_bad == 0 && worst >= -tol && steps <= 200 && elements <= 400,
        format!("{steps} steps, {elements} elements, descent failures {descent_bad}, worst slack {worst:.2e} (tol {tol:.1e})"),
    )
}

fn criterion_5(bounce: &SolveOutput) -> Verdict {
    let tol = energy_tol(bounce);
    let t0 = &bounce.trace[0];
    // recomputed from the columns, not read from the stored slack
    let worst = bounce
        .trace
        .iter()
        .skip(1)
        .map(|r| t0.energy + t0.kinetic + r.work - r.energy - r.kinetic - r.dissipation)
        .fold(f64::INFINITY, f64::min);
    verdict(worst >= -tol, format!("{} steps, worst slack {worst:.2e} (tol {tol:.1e})", bounce.diagnostics.len()))
}

fn signed_area(p: &[V2; 3]) -> f64 {
    0.5 * ((p[1] - p[0]).x * (p[2] - p[0]).y - (p[1] - p[0]).y * (p[2] - p[0]).x)
}

fn criterion_6(runs: &[(&str, &SolveOutput)]) -> Verdict {
    let mut worst_defect: f64 = 0.0;
    let mut worst_det = f64::INFINITY;
    let mut ok = true;
    for (_, out) in runs {
        let body = &out.model.body;
        let area = body.total_area();
        for r in &out.trace {
            worst_defect = worst_defect.max(r.overlap_defect / area);
            ok &= r.overlap_defect <= 1e-8 * area;
        }
        for frame in &out.frames {
            for (t, tri) in body.triangles.iter().enumerate() {
                let det = signed_area(&[frame[tri[0]], frame[tri[1]], frame[tri[2]]]) / body.areas[t];
                worst_det = worst_det.min(det);
                ok &= det >= out.model.tol.delta_det;
            }
        }
    }
    verdict(ok, format!("{} scenarios, worst defect/area {worst_defect:.1e}, min det {worst_det:.3}", runs.len()))
}

fn criterion_7(bounce: &SolveOutput, squeeze: &SolveOutput, resting: &SolveOutput) -> Verdict {
    let mut bad = Vec::new();
    let mut atoms = 0;
    let mut worst_dir: f64 = 0.0;
    let mut worst_ratio: f64 = 0.0;
    for (name, out) in [("bounce", bounce), ("squeeze", squeeze)] {
        for (d, s) in out.diagnostics.iter().zip(&out.sigmas) {
            atoms += s.atoms.len();
            worst_dir = worst_dir.max(d.force.worst_direction);
            if let Some(b) = d.bound {
                worst_ratio = worst_ratio.max(b.mass / b.bound);
            }
            let ok = d.force.support_ok && d.force.worst_direction <= 5f64.to_radians() && d.bound.is_some_and(|b| b.ok());
            if !ok {
                bad.push(format!("{name}:{}", d.step));
            }
        }
    }
    let body = &resting.model.body;
    let cfg = builtin("resting-square").unwrap();
    let load: V2 = cfg.averaged_load(body, 0.0, cfg.time.tau).iter().zip(&body.lumped).map(|(f, m)| f * *m).sum();
    let total = resting.sigmas.last().unwrap().total();
    let balance = (total + load).norm() / load.norm();
    verdict(
        bad.is_empty() && balance <= 1e-3,
        format!(
            "{atoms} atoms, worst direction {:.2}°, worst mass/bound {worst_ratio:.3}, failing steps {:?}; resting square |Σσ + load|/|load| = {balance:.1e}",
            worst_dir.to_degrees(),
            bad
        ),
    )
}

fn criterion_8(squeeze: &SolveOutput) -> Verdict {
    let body = &squeeze.model.body;
    let worst_ar = squeeze.diagnostics.iter().map(|d| d.force.worst_action_reaction).fold(0.0, f64::max);
    // reflection y ↦ 1 − y
    let mirror: Vec<Option<usize>> = body
        .nodes
        .iter()
        .map(|p| body.nodes.iter().position(|q| (q - V2::new(p.x, 1.0 - p.y)).norm() < 1e-9))
        .collect();
    let mut worst_mirror: f64 = 0.0;
    let mut unmatched = 0;
    let mut self_atoms = 0;
    for s in &squeeze.sigmas {
        let scale = s.atoms.iter().map(|a| a.force.norm()).fold(0.0, f64::max).max(1e-300);
        for a in &s.atoms {
            self_atoms += (a.kind == ContactKind::SelfContact) as usize;
            let m = mirror[a.node];
            match m.and_then(|m| s.atoms.iter().find(|b| b.node == m)) {
                Some(b) => {
                    let reflected = V2::new(a.force.x, -a.force.y);
                    worst_mirror = worst_mirror.max((b.force - reflected).norm() / scale);
                }
                None => unmatched += 1,
            }
        }
    }
    verdict(
        worst_ar <= 1e-3 && worst_mirror <= 1e-6 && unmatched == 0 && self_atoms > 0,
        format!("{self_atoms} self atoms, worst action-reaction {worst_ar:.1e}, worst mirror residual {worst_mirror:.1e}, unmatched {unmatched}"),
    )
}

/// Sampled membership of `w` in int A − int B for sectors A, B given by
/// their bounding angles.
fn sampled_difference(a: (f64, f64), b: (f64, f64), w: &V2) -> bool {
    let inside = |s: (f64, f64), v: &V2| {
        let d = (angle_of(v) - s.0).rem_euclid(TAU);
        d > 1e-9 && d < s.1 - 1e-9
    };
    for i in 1..400 {
        let p_dir = unit_at(a.0 + a.1 * i as f64 / 400.0);
        for k in 0..60 {
            let r = 10f64.powf(-3.0 + 6.0 * k as f64 / 59.0);
            let q = p_dir * r - w;
            if q.norm() > 0.0 && inside(b, &q) {
                return true;
            }
        }
    }
    false
}

fn criterion_9() -> Verdict {
    let cfg = builtin("corner-glide").unwrap();
    let (model, def) = Model::from_config(&cfg, false).unwrap();
    let body = &model.body;
    let events = contact_set(body, &def, &model.container, &model.geometry, model.tol.tol_contact);
    let single = events.len() == 1 && events[0].kind == ContactKind::SelfContact;
    if !single {
        return verdict(false, format!("expected one self-contact event, found {}", events.len()));
    }
    let e = &events[0];
    // independent sector data from the triangle vertices
    let sector = |c: usize| {
        let p = &cfg.body.components[c];
        let v = |i: usize| V2::new(p[i][0], p[i][1]);
        let (prev, x, next) = (v(2), v(0), v(1));
        let s = angle_of(&(next - x));
        (s, (angle_of(&(prev - x)) - s).rem_euclid(TAU))
    };
    let (sx, sy) = if body.node_component[e.x_node] == 0 { (sector(0), sector(1)) } else { (sector(1), sector(0)) };
    let right = |d: V2| -> Vec<V2> {
        (0..body.n_nodes())
            .map(|v| if body.node_component[v] == 1 && !body.gamma_node[v] { d } else { V2::zeros() })
            .collect()
    };
    let cases = [
        ("glide up", unit_at(55f64.to_radians()), true),
        ("glide down", unit_at(-55f64.to_radians()), true),
        ("interpenetrate", V2::new(-1.0, 0.0), false),
        ("tangential up", V2::new(0.0, 1.0), false),
        ("tangential down", V2::new(0.0, -1.0), false),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, d, expect) in cases {
        let phi = right(d);
        let verdict_mod = admissible_direction_check(body, &def, &phi, &events, model.tol.direction_tol.min(1e-8)).is_admissible();
        let rel = phi[e.x_node] - match e.partner {
            corner_contact::contact::Partner::Node(y) => phi[y],
            _ => V2::zeros(),
        };
        let oracle = sampled_difference(sx, sy, &rel);
        ok &= verdict_mod == expect && verdict_mod == oracle;
        parts.push(format!("{name}: {}", if verdict_mod { "admissible" } else { "rejected" }));
    }
    verdict(ok, format!("one self event; {}; oracle agrees: {ok}", parts.join(", ")))
}

fn com(out: &SolveOutput, k: usize) -> f64 {
    let body = &out.model.body;
    let m: f64 = body.lumped.iter().sum();
    out.frames[k].iter().zip(&body.lumped).map(|(p, w)| p.y * w).sum::<f64>() / m
}

fn criterion_10(bounce: &SolveOutput) -> Verdict {
    let n = (bounce.model.h / bounce.model.tau).round() as usize;
    let first = bounce.diagnostics.iter().find(|d| d.n_events > 0).map(|d| d.step);
    let Some(first) = first else { return verdict(false, "no contact".into()) };
    let last = bounce.diagnostics.iter().skip(first - 1).take_while(|d| d.n_events > 0).last().unwrap().step;
    let h = bounce.model.h;
    let v = |k: usize| (com(bounce, k) - com(bounce, k - n)) / h;
    let before = (n..first).all(|k| v(k) < 0.0);
    let after_k = last + n;
    let after = after_k < bounce.frames.len() && v(after_k) > 0.0;
    let tol = energy_tol(bounce);
    let t0 = &bounce.trace[0];
    let excess = bounce
        .trace
        .iter()
        .map(|r| r.energy + r.kinetic - (t0.energy + t0.kinetic + r.work))
        .fold(f64::NEG_INFINITY, f64::max);
    verdict(
        before && after && excess <= tol,
        format!(
            "contact steps {first}-{last}; window COM velocity {:.3} before, {:.3} after; max energy excess {excess:.2e}",
            v(first - 1),
            if after_k < bounce.frames.len() { v(after_k) } else { f64::NAN }
        ),
    )
}

/// Max nodal distance between two runs at the coarse run's output times.
fn trajectory_gap(coarse: &SolveOutput, fine: &SolveOutput) -> f64 {
    let r = (coarse.model.tau / fine.model.tau).round() as usize;
    coarse
        .frames
        .iter()
        .enumerate()
        .map(|(k, f)| {
            f.iter().zip(&fine.frames[k * r]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn criterion_11() -> Verdict {
    // quasistatic: squeeze before contact
    let mut qs = Vec::new();
    for tau in [0.02, 0.01, 0.005] {
        let mut cfg = builtin("squeeze").unwrap();
        cfg.time.tau = tau;
        cfg.time.h = tau;
        cfg.time.horizon = 0.2;
        qs.push(solve(&cfg));
    }
    let qs_ratio = trajectory_gap(&qs[0], &qs[1]) / trajectory_gap(&qs[1], &qs[2]);
    let qs_contact_free = qs.iter().all(|o| o.diagnostics.iter().all(|d| d.n_events == 0));
    // inertial: the bounce square in free flight, started higher
    let mut ine = Vec::new();
    for (tau, h) in [(0.005, 0.02), (0.0025, 0.01), (0.00125, 0.005)] {
        let mut cfg = builtin("bounce").unwrap();
        for p in &mut cfg.body.components[0] {
            p[1] += 0.3;
        }
        cfg.time.tau = tau;
        cfg.time.h = h;
        cfg.time.horizon = 0.2;
        ine.push(solve(&cfg));
    }
    let in_ratio = trajectory_gap(&ine[0], &ine[1]) / trajectory_gap(&ine[1], &ine[2]);
    let in_contact_free = ine.iter().all(|o| o.diagnostics.iter().all(|d| d.n_events == 0));
    verdict(
        qs_ratio >= 1.5 && in_ratio >= 1.5 && qs_contact_free && in_contact_free,
        format!("quasistatic ratio {qs_ratio:.2}, inertial ratio {in_ratio:.2}, contact-free {}", qs_contact_free && in_contact_free),
    )
}

fn main() {
    let mut results: Vec<(usize, Verdict, f64)> = Vec::new();
    // `extra` charges the solver time of the scenarios a criterion reads
    let mut timed = |id: usize, extra: f64, f: &dyn Fn() -> Verdict| {
        let t = Instant::now();
        let v = f();
        results.push((id, v, extra + t.elapsed().as_secs_f64()));
    };
    timed(1, 0.0, &criterion_1);
    timed(2, 0.0, &criterion_2);
    timed(3, 0.0, &criterion_3);

    let mut names: Vec<&str> = BUILTIN_NAMES.to_vec();
    names.push("resting-square");
    let runs: Vec<(&str, SolveOutput, f64)> = names
        .iter()
        .map(|n| {
            let t = Instant::now();
            let out = solve(&builtin(n).unwrap());
            (*n, out, t.elapsed().as_secs_f64())
        })
        .collect();
    let get = |n: &str| {
        let r = runs.iter().find(|(m, _, _)| *m == n).unwrap();
        (&r.1, r.2)
    };
    let (bounce, tb) = get("bounce");
    let (squeeze, ts) = get("squeeze");
    let (resting, tr) = get("resting-square");
    let builtins: Vec<(&str, &SolveOutput)> = runs.iter().filter(|r| r.0 != "resting-square").map(|r| (r.0, &r.1)).collect();
    let t_all: f64 = runs.iter().filter(|r| r.0 != "resting-square").map(|r| r.2).sum();

    timed(4, ts, &|| criterion_4(squeeze));
    timed(5, tb, &|| criterion_5(bounce));
    timed(6, t_all, &|| criterion_6(&builtins));
    timed(7, tb + ts + tr, &|| criterion_7(bounce, squeeze, resting));
    timed(8, ts, &|| criterion_8(squeeze));
    timed(9, 0.0, &criterion_9);
    timed(10, tb, &|| criterion_10(bounce));
    timed(11, 0.0, &criterion_11);

    // time limits per criterion, in seconds
    let limits = [5.0, 5.0, 30.0, 60.0, 60.0, f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY, 300.0];
    let mut failed = 0;
    for (id, v, s) in &results {
        let in_time = *s <= limits[id - 1];
        let pass = v.pass && in_time;
        failed += (!pass) as usize;
        println!(
            "criterion {id:>2}: {} [{s:.2}s{}] {}",
            if pass { "PASS" } else { "FAIL" },
            if in_time { "" } else { ", over time limit" },
            v.detail
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 11 criteria pass");
}
