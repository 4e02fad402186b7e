//! Incremental minimization, quasistatic and time-delayed drivers, contact
//! force extraction and energy bookkeeping.

pub mod barrier;
mod drive;
mod report;
mod step;

pub use barrier::BarrierParams;
pub use drive::{quasistatic_solve, time_delayed_solve, SolveOutput, StepDiagnostics};
pub use report::{energy_report, EnergyReport, SlackViolation};
pub use step::{
    contact_force_bound, extract_contact_force, incremental_step, BoundCheck, StepProblem,
    StepResult,
};

use crate::body::io::{ScenarioConfig, Tolerances};
use crate::body::{interpolate_gradient_and_hessian, Container, Deformation, ReferenceBody};
use crate::contact::ContactGeometry;
use crate::geom::V2;
use crate::material::{energy, MaterialParams};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("Unconstrained: rho = 0 with empty Dirichlet boundary needs --pin-rigid-modes")]
    Unconstrained,
    #[error("InfeasibleStart: {0}")]
    InfeasibleStart(String),
    #[error("LineSearchFailure after {iterations} iterations, gradient {grad_norm:e}")]
    LineSearchFailure {
        iterations: usize,
        grad_norm: f64,
        last: Vec<V2>,
    },
    #[error("NonDescent: J went from {j_prev:e} to {j_new:e}")]
    NonDescent { j_prev: f64, j_new: f64 },
    #[error("StepFailure at step {step} (t = {t}): {reason}")]
    StepFailure {
        step: usize,
        t: f64,
        reason: String,
        last: Vec<V2>,
    },
    #[error("ValidationFailure: {0}")]
    ValidationFailure(String),
    #[error("BoundViolation: mass {mass:e} exceeds {bound:e}")]
    BoundViolation { mass: f64, bound: f64 },
}

/// Absolute tolerances derived from the scenario scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub delta_det: f64,
    pub tol_cn: f64,
    pub tol_energy: f64,
    pub tol_contact: f64,
    pub tol_grad: f64,
    pub armijo: f64,
    pub shrink: f64,
    pub max_iter: usize,
    pub tol_ar: f64,
    pub direction_tol: f64,
    pub theta_floor: f64,
}

/// Everything that stays fixed over a run.
#[derive(Debug, Clone)]
pub struct Model {
    pub body: ReferenceBody,
    pub params: MaterialParams,
    pub container: Container,
    pub geometry: ContactGeometry,
    pub barrier: BarrierParams,
    /// Per degree of freedom (2·node + component), held at its value.
    pub fixed: Vec<bool>,
    pub rho: f64,
    pub tau: f64,
    pub h: f64,
    pub tol: Scaled,
}

/// Two nodes at different heights whose x-coordinates fix translation
/// along x and rotation: the node nearest the centroid and the topmost
/// node nearest the centroid's vertical.
pub fn rigid_pins(body: &ReferenceBody) -> [usize; 2] {
    let n = body.n_nodes() as f64;
    let c: V2 = body.nodes.iter().sum::<V2>() / n;
    let near = (0..body.n_nodes())
        .min_by(|&i, &j| (body.nodes[i] - c).norm().total_cmp(&(body.nodes[j] - c).norm()))
        .unwrap();
    let ymax = body.nodes.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let top = (0..body.n_nodes())
        .filter(|&i| body.nodes[i].y >= ymax - 1e-12)
        .min_by(|&i, &j| (body.nodes[i].x - c.x).abs().total_cmp(&(body.nodes[j].x - c.x).abs()))
        .unwrap();
    [near, top]
}

impl Model {
    /// Builds the model and the initial deformation. `inertial` selects
    /// whether ρ enters the scheme.
    pub fn from_config(cfg: &ScenarioConfig, inertial: bool) -> Result<(Model, Deformation), SolverError> {
        let body = cfg
            .build_body()
            .map_err(|e| SolverError::InfeasibleStart(e.to_string()))?;
        let rho = if inertial { cfg.time.rho } else { 0.0 };
        if inertial && !(rho > 0.0) {
            return Err(SolverError::InfeasibleStart("inertial mode needs rho > 0".into()));
        }
        if rho == 0.0 && body.gamma.is_empty() && !cfg.pin_rigid_modes {
            return Err(SolverError::Unconstrained);
        }
        let def0 = interpolate_gradient_and_hessian(&body, cfg.initial_positions(&body));
        let t: &Tolerances = &cfg.tolerances;
        if def0.min_det() < t.delta_det {
            return Err(SolverError::InfeasibleStart(format!(
                "min det {} below delta_det",
                def0.min_det()
            )));
        }
        let params = cfg.material;
        let diam = body.diameter();
        let container = cfg.container();
        let geometry = ContactGeometry::new(&body, &def0, t.r_loc_rel * diam);
        let d_hat = t.d_hat_rel * diam;
        for v in body.boundary_nodes() {
            for (_, g, _) in container.wall_gaps(&def0.positions[v]) {
                if g <= 0.0 {
                    return Err(SolverError::InfeasibleStart(format!("node {v} outside the container")));
                }
            }
        }
        if crate::solver::barrier::boundary_crossing(&body, &def0.positions) {
            return Err(SolverError::InfeasibleStart("boundary segments cross".into()));
        }
        let mut fixed = vec![false; 2 * body.n_nodes()];
        for v in 0..body.n_nodes() {
            if body.gamma_node[v] {
                fixed[2 * v] = true;
                fixed[2 * v + 1] = true;
            }
        }
        if cfg.pin_rigid_modes && body.gamma.is_empty() {
            for v in rigid_pins(&body) {
                fixed[2 * v] = true;
            }
        }
        let e0 = energy(&params, &body, &def0);
        let tol = Scaled {
            delta_det: t.delta_det,
            tol_cn: t.tol_cn_rel * body.total_area(),
            tol_energy: t.tol_energy_rel * (e0 + 1.0),
            tol_contact: t.tol_contact_rel * diam,
            tol_grad: t.tol_grad_rel * (params.a + params.c) * diam * body.resolution,
            armijo: t.armijo,
            shrink: t.shrink,
            max_iter: t.max_iter,
            tol_ar: t.tol_ar,
            direction_tol: t.direction_tol,
            theta_floor: t.theta_floor,
        };
        let barrier = BarrierParams {
            kappa: t.kappa_rel * (params.a + params.c) * diam,
            d_hat,
        };
        Ok((
            Model {
                body,
                params,
                container,
                geometry,
                barrier,
                fixed,
                rho,
                tau: cfg.time.tau,
                h: cfg.time.h,
                tol,
            },
            def0,
        ))
    }

    /// Σ_v m_v |b_v|² with lumped nodal areas.
    pub fn lumped_norm2(&self, b: &[V2]) -> f64 {
        b.iter().zip(&self.body.lumped).map(|(v, m)| m * v.norm_squared()).sum()
    }

    /// Σ_v m_v f_v · d_v.
    pub fn lumped_dot(&self, f: &[V2], d: &[V2]) -> f64 {
        f.iter()
            .zip(d)
            .zip(&self.body.lumped)
            .map(|((a, b), m)| m * a.dot(b))
            .sum()
    }
}
