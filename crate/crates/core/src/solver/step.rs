//! One incremental minimization step and the contact force it produces.

use super::barrier::{
    active_pairs, barrier_energy, barrier_gradient, boundary_crossing, pair_hessian, pair_nodes,
    step_cap,
};
use super::{Model, SolverError};
use crate::body::{interpolate_gradient_and_hessian, Deformation};
use crate::contact::{
    contact_nodes, contact_set, ContactEvent, ContactForce, ContactKind, ForceAtom, InteriorField,
    Partner,
};
use crate::geom::V2;
use crate::material::{dissipation, dissipation_gradient, dissipation_hessian, energy, energy_gradient, energy_hessian};
use nalgebra::{DMatrix, DVector};

/// Data of one inner step.
#[derive(Debug, Clone, Copy)]
pub struct StepProblem<'a> {
    pub eta_prev: &'a Deformation,
    /// Time-averaged load density over the step.
    pub load: &'a [V2],
    /// Velocity datum of the time-delay term (ignored when ρ = 0).
    pub zeta: &'a [V2],
}

#[derive(Debug, Clone)]
pub struct StepResult {
    pub eta: Deformation,
    pub sigma: ContactForce,
    /// Nodal residual of the functional without the barrier.
    pub residual: Vec<V2>,
    pub events: Vec<ContactEvent>,
    pub iterations: usize,
    pub j_prev: f64,
    pub j_new: f64,
    pub grad_norm: f64,
    /// Converged by stalling at round-off rather than by the gradient test.
    pub stalled: bool,
    pub energy: f64,
    pub barrier: f64,
    /// R(η_{k−1}, b) with b = (η − η_{k−1})/τ.
    pub dissipation_rate: f64,
    /// Σ m f · (η − η_{k−1}).
    pub work: f64,
    pub velocity: Vec<V2>,
    /// Σ m |ζ|² and Σ m |b − ζ|².
    pub zeta_norm2: f64,
    pub deviation_norm2: f64,
}

struct Eval {
    def: Deformation,
    value: f64,
}

fn displacement(prev: &[V2], pos: &[V2]) -> Vec<V2> {
    pos.iter().zip(prev).map(|(x, p)| x - p).collect()
}

fn objective(model: &Model, pb: &StepProblem, pos: Vec<V2>) -> Eval {
    let body = &model.body;
    let def = interpolate_gradient_and_hessian(body, pos);
    if def.dets.iter().any(|&d| !(d > 0.0)) {
        return Eval { def, value: f64::INFINITY };
    }
    let d = displacement(&pb.eta_prev.positions, &def.positions);
    let tau = model.tau;
    let mut v = energy(&model.params, body, &def)
        + barrier_energy(body, &model.geometry, &model.container, &def.positions, &model.barrier)
        + dissipation(&model.params, body, pb.eta_prev, &d) / tau
        - model.lumped_dot(pb.load, &d);
    if model.rho > 0.0 {
        let dev: Vec<V2> = d.iter().zip(pb.zeta).map(|(d, z)| d - z * tau).collect();
        v += model.rho / (2.0 * model.h * tau) * model.lumped_norm2(&dev);
    }
    Eval { def, value: v }
}

/// Gradient without the barrier, and the barrier gradient split into its
/// wall and self parts.
fn gradients(model: &Model, pb: &StepProblem, def: &Deformation) -> (Vec<V2>, Vec<V2>, Vec<V2>) {
    let body = &model.body;
    let tau = model.tau;
    let d = displacement(&pb.eta_prev.positions, &def.positions);
    let mut g = energy_gradient(&model.params, body, def).expect("feasible iterate");
    let gr = dissipation_gradient(&model.params, body, pb.eta_prev, &d);
    for v in 0..body.n_nodes() {
        let m = body.lumped[v];
        g[v] += gr[v] / tau - pb.load[v] * m;
        if model.rho > 0.0 {
            g[v] += (d[v] - pb.zeta[v] * tau) * (model.rho * m / (model.h * tau));
        }
    }
    let (wall, own) = barrier_gradient(body, &model.geometry, &model.container, &def.positions, &model.barrier);
    (g, wall, own)
}

fn free_max(model: &Model, g: &[V2]) -> f64 {
    let mut m: f64 = 0.0;
    for (v, gv) in g.iter().enumerate() {
        for k in 0..2 {
            if !model.fixed[2 * v + k] {
                m = m.max(gv[k].abs());
            }
        }
    }
    m
}

fn feasible(model: &Model, def: &Deformation) -> bool {
    def.min_det() >= model.tol.delta_det && !boundary_crossing(&model.body, &def.positions)
}

/// Minimizes the incremental functional from η_{k−1} by projected Newton
/// with a time-of-impact capped Armijo line search.
pub fn incremental_step(model: &Model, pb: &StepProblem) -> Result<StepResult, SolverError> {
    let body = &model.body;
    let n = body.n_nodes();
    let ndof = 2 * n;
    let free: Vec<usize> = (0..ndof).filter(|&i| !model.fixed[i]).collect();
    let mut slot = vec![usize::MAX; ndof];
    for (k, &i) in free.iter().enumerate() {
        slot[i] = k;
    }
    // constant part of the Hessian: dissipation and inertia
    let mut h_const = DMatrix::<f64>::zeros(free.len(), free.len());
    {
        let mut add = |r: usize, c: usize, v: f64| {
            if slot[r] != usize::MAX && slot[c] != usize::MAX {
                h_const[(slot[r], slot[c])] += v;
            }
        };
        dissipation_hessian(&model.params, body, pb.eta_prev, 1.0 / model.tau, &mut add);
        if model.rho > 0.0 {
            for v in 0..n {
                let m = model.rho * body.lumped[v] / (model.h * model.tau);
                add(2 * v, 2 * v, m);
                add(2 * v + 1, 2 * v + 1, m);
            }
        }
    }

    let start = objective(model, pb, pb.eta_prev.positions.clone());
    let j_prev = start.value;
    if !j_prev.is_finite() {
        return Err(SolverError::InfeasibleStart("previous state has infinite energy".into()));
    }
    let mut cur = start;
    let mut iterations = 0;
    let mut stalled = false;
    let diam = body.diameter();
    let grad_norm;
    loop {
        let (g0, wall, own) = gradients(model, pb, &cur.def);
        let g: Vec<V2> = (0..n).map(|v| g0[v] + wall[v] + own[v]).collect();
        let gn = free_max(model, &g);
        if gn <= model.tol.tol_grad {
            grad_norm = gn;
            break;
        }
        if iterations >= model.tol.max_iter {
            return Err(SolverError::LineSearchFailure {
                iterations,
                grad_norm: gn,
                last: cur.def.positions.clone(),
            });
        }
        iterations += 1;

        let mut hm = h_const.clone();
        {
            let mut add = |r: usize, c: usize, v: f64| {
                if slot[r] != usize::MAX && slot[c] != usize::MAX {
                    hm[(slot[r], slot[c])] += v;
                }
            };
            energy_hessian(&model.params, body, &cur.def, &mut add);
            let pos = &cur.def.positions;
            for q in active_pairs(body, &model.geometry, &model.container, pos, model.barrier.d_hat) {
                let nodes = pair_nodes(body, &q);
                let k = 2 * nodes.len();
                let hq = pair_hessian(body, &model.container, pos, &q, &model.barrier);
                for r in 0..k {
                    for c in 0..k {
                        let dr = 2 * nodes[r / 2] + r % 2;
                        let dc = 2 * nodes[c / 2] + c % 2;
                        add(dr, dc, hq[c * k + r]);
                    }
                }
            }
        }
        let rhs = DVector::from_iterator(free.len(), free.iter().map(|&i| -g[i / 2][i % 2]));
        let diag_max = (0..free.len()).map(|i| hm[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        let mut shift = 0.0;
        let sol = loop {
            let mut a = hm.clone();
            if shift > 0.0 {
                for i in 0..free.len() {
                    a[(i, i)] += shift;
                }
            }
            if let Some(ch) = a.cholesky() {
                break ch.solve(&rhs);
            }
            shift = if shift == 0.0 { 1e-10 * diag_max } else { shift * 10.0 };
            if shift > 1e6 * diag_max {
                return Err(SolverError::LineSearchFailure {
                    iterations,
                    grad_norm: gn,
                    last: cur.def.positions.clone(),
                });
            }
        };
        let mut dir = vec![V2::zeros(); n];
        for (k, &i) in free.iter().enumerate() {
            dir[i / 2][i % 2] = sol[k];
        }
        let slope: f64 = -rhs.dot(&sol);
        let pos = &cur.def.positions;
        let cap = step_cap(body, &model.geometry, &model.container, pos, &dir, 0.8);
        let mut alpha = cap;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<V2> = pos.iter().zip(&dir).map(|(x, d)| x + d * alpha).collect();
            let e = objective(model, pb, trial);
            if e.value.is_finite()
                && feasible(model, &e.def)
                && e.value <= cur.value + model.tol.armijo * alpha * slope
            {
                accepted = Some(e);
                break;
            }
            alpha *= model.tol.shrink;
        }
        let max_step = dir.iter().map(|d| d.norm()).fold(0.0, f64::max) * cap;
        match accepted {
            Some(e) => {
                let moved = dir.iter().map(|d| d.norm()).fold(0.0, f64::max) * alpha;
                cur = e;
                if moved <= 1e-14 * diam {
                    grad_norm = gn;
                    stalled = true;
                    break;
                }
            }
            None => {
                // at the round-off floor the predicted decrease is invisible
                if (slope * cap).abs() <= 1e-13 * (1.0 + cur.value.abs()) || max_step <= 1e-14 * diam {
                    grad_norm = gn;
                    stalled = true;
                    break;
                }
                return Err(SolverError::LineSearchFailure {
                    iterations,
                    grad_norm: gn,
                    last: cur.def.positions.clone(),
                });
            }
        }
    }

    let j_new = cur.value;
    if j_new > j_prev + model.tol.tol_energy {
        return Err(SolverError::NonDescent { j_prev, j_new });
    }
    let def = cur.def;
    let (residual, wall, _) = gradients(model, pb, &def);
    let events = contact_set(body, &def, &model.container, &model.geometry, model.tol.tol_contact);
    let sigma = extract_contact_force(model, &def, &residual, &wall, &events, 0);
    let d = displacement(&pb.eta_prev.positions, &def.positions);
    let tau = model.tau;
    let velocity: Vec<V2> = d.iter().map(|x| x / tau).collect();
    let dev: Vec<V2> = velocity.iter().zip(pb.zeta).map(|(b, z)| b - z).collect();
    Ok(StepResult {
        energy: energy(&model.params, body, &def),
        barrier: barrier_energy(body, &model.geometry, &model.container, &def.positions, &model.barrier),
        dissipation_rate: dissipation(&model.params, body, pb.eta_prev, &velocity),
        work: model.lumped_dot(pb.load, &d),
        zeta_norm2: model.lumped_norm2(pb.zeta),
        deviation_norm2: model.lumped_norm2(&dev),
        velocity,
        eta: def,
        sigma,
        residual,
        events,
        iterations,
        j_prev,
        j_new,
        grad_norm,
        stalled,
    })
}

/// σ at the nodes of the contact set: the residual of the functional
/// without the barrier, which the barrier balances at a minimizer. Atoms
/// below ten times the gradient tolerance are solver noise and dropped;
/// nodes with a held degree of freedom carry support reactions instead.
pub fn extract_contact_force(
    model: &Model,
    _def: &Deformation,
    residual: &[V2],
    wall_gradient: &[V2],
    events: &[ContactEvent],
    step: usize,
) -> ContactForce {
    let body = &model.body;
    let on = contact_nodes(body, events);
    let mut gap = vec![f64::INFINITY; body.n_nodes()];
    for e in events {
        gap[e.x_node] = gap[e.x_node].min(e.gap);
        match e.partner {
            Partner::Node(y) => gap[y] = gap[y].min(e.gap),
            Partner::Edge { segment, .. } => {
                let s = body.segments[segment];
                gap[s.a] = gap[s.a].min(e.gap);
                gap[s.b] = gap[s.b].min(e.gap);
            }
            Partner::Wall(_) => {}
        }
    }
    let noise = 10.0 * model.tol.tol_grad;
    let mut atoms = Vec::new();
    for v in 0..body.n_nodes() {
        if !on[v] || model.fixed[2 * v] || model.fixed[2 * v + 1] {
            continue;
        }
        let force = residual[v];
        if force.norm() <= noise {
            continue;
        }
        let obstacle_part = -wall_gradient[v];
        let kind = if obstacle_part.norm() >= (force - obstacle_part).norm() {
            ContactKind::Obstacle
        } else {
            ContactKind::SelfContact
        };
        atoms.push(ForceAtom {
            node: v,
            force,
            weight: body.boundary_weight[v],
            gap: gap[v],
            kind,
            obstacle_part,
        });
    }
    ContactForce { atoms, step }
}

/// Both sides of the mass bound ‖σ‖ ≤ (1/sin ϑ) Σ σ_x · t̃(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub mass: f64,
    pub tested: f64,
    pub theta: f64,
    pub bound: f64,
}

impl BoundCheck {
    pub fn ok(&self) -> bool {
        self.mass <= self.bound * (1.0 + 1e-9) + 1e-300
    }

    /// mass / tested, to compare against 1/sin ϑ.
    pub fn ratio(&self) -> f64 {
        if self.tested > 0.0 {
            self.mass / self.tested
        } else {
            0.0
        }
    }
}

pub fn contact_force_bound(sigma: &ContactForce, field: &InteriorField) -> Result<BoundCheck, super::SolverError> {
    let mass = sigma.mass();
    let tested: f64 = sigma.atoms.iter().map(|a| a.force.dot(&field.field[a.node])).sum();
    let check = BoundCheck {
        mass,
        tested,
        theta: field.theta,
        bound: tested / field.theta.sin(),
    };
    if check.ok() {
        Ok(check)
    } else {
        Err(SolverError::BoundViolation { mass, bound: check.bound })
    }
}
