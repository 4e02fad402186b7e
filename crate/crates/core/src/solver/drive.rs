//! Quasistatic and time-delayed drivers.

use super::step::{contact_force_bound, incremental_step, BoundCheck, StepProblem};
use super::{Model, SolverError};
use crate::body::io::{ScenarioConfig, TraceRecord};
use crate::body::{interpolate_gradient_and_hessian, Deformation};
use crate::contact::{
    ciarlet_necas_defect, min_gap, uniformly_interior_field, validate_contact_force, ContactForce,
    ContactKind, ForceReport, Pairing,
};
use crate::geom::V2;
use crate::material::energy;
use crate::solver::barrier::barrier_energy;

#[derive(Debug, Clone)]
pub struct StepDiagnostics {
    pub step: usize,
    pub t: f64,
    pub iterations: usize,
    pub j_prev: f64,
    pub j_new: f64,
    pub grad_norm: f64,
    pub stalled: bool,
    pub n_events: usize,
    pub n_self_events: usize,
    pub force: ForceReport,
    /// None when no interior field certificate could be built.
    pub bound: Option<BoundCheck>,
    pub bound_error: Option<String>,
    pub pairing: Pairing,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub model: Model,
    /// Node positions, index 0 holding η₀.
    pub frames: Vec<Vec<V2>>,
    pub trace: Vec<TraceRecord>,
    /// One contact force per step, index 0 for step 1.
    pub sigmas: Vec<ContactForce>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub inertial: bool,
}

impl SolveOutput {
    pub fn final_deformation(&self) -> Deformation {
        interpolate_gradient_and_hessian(&self.model.body, self.frames.last().unwrap().clone())
    }

    /// Whether every emitted force passed validation and the bound check.
    pub fn forces_ok(&self) -> bool {
        self.diagnostics
            .iter()
            .all(|d| d.force.ok() && d.bound.is_some_and(|b| b.ok()))
    }
}

/// ρ = 0 scheme: inertia is dropped even if the scenario has a density.
pub fn quasistatic_solve(cfg: &ScenarioConfig) -> Result<SolveOutput, SolverError> {
    run(cfg, false)
}

/// Time-delayed inertial scheme: the velocity datum of step k is the
/// velocity of the step one outer interval h earlier, and η* before t = 0.
pub fn time_delayed_solve(cfg: &ScenarioConfig) -> Result<SolveOutput, SolverError> {
    run(cfg, true)
}

fn run(cfg: &ScenarioConfig, inertial: bool) -> Result<SolveOutput, SolverError> {
    let (model, def0) = Model::from_config(cfg, inertial)?;
    let body = &model.body;
    let n = body.n_nodes();
    let tau = model.tau;
    let rho = model.rho;
    let per = cfg.steps_per_interval();
    let steps = cfg.steps();
    let eta_star = if inertial { cfg.initial_velocity(body) } else { vec![V2::zeros(); n] };

    let e0 = energy(&model.params, body, &def0)
        + barrier_energy(body, &model.geometry, &model.container, &def0.positions, &model.barrier);
    let k0 = 0.5 * rho * model.lumped_norm2(&eta_star);
    let mut trace = vec![TraceRecord {
        step: 0,
        t: 0.0,
        energy: e0,
        kinetic: k0,
        min_det: def0.min_det(),
        min_gap: min_gap(body, &def0.positions, &model.container, &model.geometry),
        overlap_defect: ciarlet_necas_defect(body, &def0).unwrap_or(f64::INFINITY),
        ..Default::default()
    }];
    let mut frames = vec![def0.positions.clone()];
    let mut sigmas = Vec::with_capacity(steps);
    let mut diagnostics = Vec::with_capacity(steps);
    // ‖b_j‖² for the kinetic window and b_j for the delay datum
    let mut speeds2: Vec<f64> = Vec::with_capacity(steps);
    let mut velocities: Vec<Vec<V2>> = Vec::with_capacity(steps);
    let star2 = model.lumped_norm2(&eta_star);
    let mut work = 0.0;
    let mut diss2 = 0.0;
    let mut qs_extra = 0.0;
    let mut prev = def0;
    for k in 1..=steps {
        let t0 = (k - 1) as f64 * tau;
        let t1 = k as f64 * tau;
        let load = cfg.averaged_load(body, t0, t1);
        let zeta: &[V2] = if k > per { &velocities[k - per - 1] } else { &eta_star };
        let pb = StepProblem { eta_prev: &prev, load: &load, zeta };
        let res = incremental_step(&model, &pb).map_err(|e| {
            let last = match &e {
                SolverError::LineSearchFailure { last, .. } => last.clone(),
                _ => prev.positions.clone(),
            };
            SolverError::StepFailure { step: k, t: t1, reason: e.to_string(), last }
        })?;

        work += res.work;
        diss2 += 2.0 * tau * res.dissipation_rate;
        qs_extra += tau * res.dissipation_rate;
        if rho > 0.0 {
            qs_extra -= tau * rho / (2.0 * model.h) * (res.zeta_norm2 - res.deviation_norm2);
        }
        speeds2.push(model.lumped_norm2(&res.velocity));
        let window: f64 = (k as isize - per as isize + 1..=k as isize)
            .map(|j| if j <= 0 { star2 } else { speeds2[j as usize - 1] })
            .sum();
        let kinetic = 0.5 * rho * window / per as f64;
        let e = res.energy + res.barrier;

        let mut sigma = res.sigma.clone();
        sigma.step = k;
        let pairing = Pairing::from_events(body, &res.events);
        let force = validate_contact_force(
            &sigma,
            body,
            &res.eta,
            &res.events,
            &pairing,
            model.tol.direction_tol,
            model.tol.tol_ar,
        );
        let (bound, bound_error) = match uniformly_interior_field(body, &res.eta, model.tol.theta_floor) {
            Ok(field) => match contact_force_bound(&sigma, &field) {
                Ok(b) => (Some(b), None),
                Err(err) => (None, Some(err.to_string())),
            },
            Err(err) => (None, Some(err.to_string())),
        };
        trace.push(TraceRecord {
            step: k,
            t: t1,
            energy: e,
            kinetic,
            dissipation: diss2,
            work,
            slack_qs: e0 + work - e - qs_extra,
            slack_td: e0 + k0 + work - e - kinetic - diss2,
            min_det: res.eta.min_det(),
            min_gap: min_gap(body, &res.eta.positions, &model.container, &model.geometry),
            overlap_defect: ciarlet_necas_defect(body, &res.eta).unwrap_or(f64::INFINITY),
            total_sigma: {
                let s = sigma.total();
                [s.x, s.y]
            },
        });
        diagnostics.push(StepDiagnostics {
            step: k,
            t: t1,
            iterations: res.iterations,
            j_prev: res.j_prev,
            j_new: res.j_new,
            grad_norm: res.grad_norm,
            stalled: res.stalled,
            n_events: res.events.len(),
            n_self_events: res.events.iter().filter(|e| e.kind == ContactKind::SelfContact).count(),
            force,
            bound,
            bound_error,
            pairing,
        });
        sigmas.push(sigma);
        frames.push(res.eta.positions.clone());
        velocities.push(res.velocity);
        prev = res.eta;
    }
    Ok(SolveOutput { model, frames, trace, sigmas, diagnostics, inertial })
}
