//! Library results checked against closed forms and brute-force sampling.

use corner_contact::body::interpolate_gradient_and_hessian;
use corner_contact::contact::{ciarlet_necas_defect, triangles_overlap, union_area};
use corner_contact::geom::V2;
use corner_contact::harness::builtin;
use corner_contact::solver::barrier::{barrier_energy, barrier_gradient};
use corner_contact::solver::{time_delayed_solve, Model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn inside(t: &[V2; 3], p: &V2) -> bool {
    let s = |a: V2, b: V2| (b - a).perp(&(p - a));
    let (a, b, c) = (s(t[0], t[1]), s(t[1], t[2]), s(t[2], t[0]));
    (a > 0.0 && b > 0.0 && c > 0.0) || (a < 0.0 && b < 0.0 && c < 0.0)
}

#[test]
fn union_area_of_two_offset_squares() {
    let sq = |x: f64| {
        let (a, b, c, d) = (V2::new(x, 0.0), V2::new(x + 1.0, 0.0), V2::new(x + 1.0, 1.0), V2::new(x, 1.0));
        [[a, b, c], [a, c, d]]
    };
    let tris: Vec<[V2; 3]> = sq(0.0).into_iter().chain(sq(0.5)).collect();
    assert!((union_area(&tris) - 1.5).abs() < 1e-12);
}

#[test]
fn overlap_defect_equals_the_doubly_covered_area() {
    // squeeze: unit square at the origin and a 1.5 square from x = 1.005;
    // sliding the big one left by 0.505 covers [0.5, 1] x [0, 1] twice
    let (model, def) = Model::from_config(&builtin("squeeze").unwrap(), false).unwrap();
    let body = &model.body;
    let pos: Vec<V2> = (0..body.n_nodes())
        .map(|v| {
            let p = def.positions[v];
            if body.node_component[v] == 1 { p - V2::new(0.505, 0.0) } else { p }
        })
        .collect();
    let shifted = interpolate_gradient_and_hessian(body, pos);
    assert!(ciarlet_necas_defect(body, &def).unwrap() < 1e-12);
    assert!((ciarlet_necas_defect(body, &shifted).unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn triangle_overlap_agrees_with_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tri = |rng: &mut ChaCha8Rng| -> [V2; 3] {
        let c = V2::new(rng.random_range(0.0..2.0), rng.random_range(0.0..2.0));
        [0, 1, 2].map(|_| c + V2::new(rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)))
    };
    let (mut hits, mut misses) = (0, 0);
    for _ in 0..300 {
        let (a, b) = (tri(&mut rng), tri(&mut rng));
        let n = 120;
        let sampled = (0..n * n).any(|k| {
            let p = V2::new(-1.0 + 4.0 * (k % n) as f64 / n as f64, -1.0 + 4.0 * (k / n) as f64 / n as f64);
            inside(&a, &p) && inside(&b, &p)
        });
        let exact = triangles_overlap(&a, &b);
        // a sampled common point proves overlap
        assert!(!sampled || exact);
        if exact {
            hits += 1;
        } else {
            misses += 1;
        }
    }
    assert!(hits > 30 && misses > 30, "{hits} {misses}");
}

fn check_barrier_gradient(name: &str, lift: f64) {
    let cfg = builtin(name).unwrap();
    let (model, def) = Model::from_config(&cfg, cfg.time.rho > 0.0).unwrap();
    let body = &model.body;
    let pos: Vec<V2> = def.positions.iter().map(|p| p + V2::new(0.0, lift)).collect();
    let e = |p: &[V2]| barrier_energy(body, &model.geometry, &model.container, p, &model.barrier);
    assert!(e(&pos) > 0.0, "{name}: no active barrier pair");
    let (wall, own) = barrier_gradient(body, &model.geometry, &model.container, &pos, &model.barrier);
    let step = 1e-4 * model.barrier.d_hat;
    let scale = wall.iter().chain(&own).map(|g| g.norm()).fold(0.0, f64::max);
    for v in 0..body.n_nodes() {
        for c in 0..2 {
            let mut p = pos.clone();
            p[v][c] += step;
            let up = e(&p);
            p[v][c] -= 2.0 * step;
            let down = e(&p);
            let fd = (up - down) / (2.0 * step);
            let g = wall[v][c] + own[v][c];
            assert!((fd - g).abs() <= 1e-5 * scale, "{name}: node {v} dof {c}: {g} vs {fd}");
        }
    }
}

#[test]
fn barrier_gradient_matches_differences_on_a_wall() {
    // bounce starts 0.02 above the floor; drop it to half the activation distance
    let (model, _) = Model::from_config(&builtin("bounce").unwrap(), true).unwrap();
    check_barrier_gradient("bounce", -0.02 + 0.5 * model.barrier.d_hat);
}

#[test]
fn barrier_gradient_matches_differences_at_a_self_contact() {
    check_barrier_gradient("corner-glide", 0.0);
}

#[test]
fn free_fall_follows_the_delayed_velocity_recursion() {
    // far from the floor only gravity acts on the centre of mass, so the
    // scheme gives b_k = b_{k-N} + h g with b_j = initial speed for j <= 0
    let mut cfg = builtin("bounce").unwrap();
    cfg.body.components[0].iter_mut().for_each(|p| p[1] += 5.0);
    cfg.time.horizon = 0.1;
    let out = time_delayed_solve(&cfg).unwrap();
    let body = &out.model.body;
    let m: f64 = body.lumped.iter().sum();
    let com = |k: usize| out.frames[k].iter().zip(&body.lumped).map(|(p, w)| p.y * w).sum::<f64>() / m;
    let (tau, h) = (out.model.tau, out.model.h);
    let n = (h / tau).round() as usize;
    let mut b = vec![-1.0; n];
    for k in 1..out.frames.len() {
        let expect = b[k - 1] - h;
        b.push(expect);
        let got = (com(k) - com(k - 1)) / tau;
        assert!((got - expect).abs() < 1e-8, "step {k}: {got} vs {expect}");
    }
}
