//! Stored energy and dissipation.
//!
//! E(η) = Σ_T |T| (a|∇η|² + c det(∇η)^{-q}) + ε_H Σ_m w_m |H_m|^p
//! R(η, b) = ν Σ_T |T| |∇bᵀ∇η + ∇ηᵀ∇b|²
//!
//! H_m is the recovered nodal Hessian and w_m the lumped nodal area.

use crate::body::{Deformation, ReferenceBody};
use crate::geom::{cof, M2, V2};
use nalgebra::{DMatrix, Matrix4, SymmetricEigen, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaterialError {
    #[error("infinite energy: some element has det <= 0")]
    InfiniteEnergy,
    #[error("invalid material parameter: {0}")]
    InvalidParams(String),
    #[error("AuditFailure: {inequality} violated, witness {witness}")]
    AuditFailure { inequality: String, witness: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialParams {
    pub a: f64,
    pub c: f64,
    pub q: f64,
    pub eps_h: f64,
    pub p: f64,
    /// Viscosity scale of the dissipation.
    pub nu: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        MaterialParams {
            a: 1.0,
            c: 1.0,
            q: 4.0,
            eps_h: 1e-3,
            p: 4.0,
            nu: 1.0,
        }
    }
}

impl MaterialParams {
    pub fn validate(&self) -> Result<(), MaterialError> {
        let bad = |s: &str| Err(MaterialError::InvalidParams(s.to_string()));
        if !(self.a > 0.0 && self.c > 0.0 && self.eps_h > 0.0 && self.nu > 0.0) {
            return bad("a, c, eps_h and nu must be positive");
        }
        if !(self.q >= 2.0) {
            return bad("q must be at least 2");
        }
        if !(self.p > 2.0) {
            return bad("p must exceed 2");
        }
        Ok(())
    }

    /// Parameters with c = 2a/q, which makes the identity stress free.
    pub fn stress_free(a: f64, q: f64, eps_h: f64, p: f64, nu: f64) -> Self {
        MaterialParams {
            a,
            c: 2.0 * a / q,
            q,
            eps_h,
            p,
            nu,
        }
    }

    /// Elastic energy density a|F|² + c det^{-q}; infinite for det ≤ 0.
    pub fn density(&self, f: &M2) -> f64 {
        let det = f.determinant();
        if det <= 0.0 {
            return f64::INFINITY;
        }
        self.a * f.norm_squared() + self.c * det.powf(-self.q)
    }

    /// dW/dF = 2aF − qc det^{-q-1} cof F.
    pub fn stress(&self, f: &M2) -> M2 {
        let det = f.determinant();
        f * (2.0 * self.a) - cof(f) * (self.q * self.c * det.powf(-self.q - 1.0))
    }
}

fn vec4(m: &M2) -> Vector4<f64> {
    Vector4::new(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)])
}

/// d²W/dF² in the (00, 01, 10, 11) ordering.
pub fn density_hessian(params: &MaterialParams, f: &M2) -> Matrix4<f64> {
    let det = f.determinant();
    let cv = vec4(&cof(f));
    let mut cof_op = Matrix4::zeros();
    cof_op[(0, 3)] = 1.0;
    cof_op[(3, 0)] = 1.0;
    cof_op[(1, 2)] = -1.0;
    cof_op[(2, 1)] = -1.0;
    let qc = params.q * params.c;
    Matrix4::identity() * (2.0 * params.a)
        + cv * cv.transpose() * (qc * (params.q + 1.0) * det.powf(-params.q - 2.0))
        - cof_op * (qc * det.powf(-params.q - 1.0))
}

fn project_psd4(m: &Matrix4<f64>) -> Matrix4<f64> {
    let eig = SymmetricEigen::new(*m);
    if eig.eigenvalues.iter().all(|&l| l >= 0.0) {
        return *m;
    }
    let d = eig.eigenvalues.map(|l| l.max(0.0));
    eig.eigenvectors * Matrix4::from_diagonal(&d) * eig.eigenvectors.transpose()
}

fn hess_norm2(h: &crate::body::Hess) -> f64 {
    h.iter().flatten().flatten().map(|x| x * x).sum()
}

/// Energy; `f64::INFINITY` marks a deformation outside the barrier domain.
pub fn energy(params: &MaterialParams, body: &ReferenceBody, def: &Deformation) -> f64 {
    if def.dets.iter().any(|&d| !(d > 0.0)) {
        return f64::INFINITY;
    }
    elastic_energy(params, body, def) + hessian_energy(params, body, def)
}

pub fn elastic_energy(params: &MaterialParams, body: &ReferenceBody, def: &Deformation) -> f64 {
    def.grads
        .iter()
        .zip(&body.areas)
        .map(|(f, a)| a * params.density(f))
        .sum()
}

pub fn hessian_energy(params: &MaterialParams, body: &ReferenceBody, def: &Deformation) -> f64 {
    let half_p = 0.5 * params.p;
    params.eps_h
        * def
            .hessian
            .iter()
            .zip(&body.lumped)
            .map(|(h, w)| w * hess_norm2(h).powf(half_p))
            .sum::<f64>()
}

/// Exact gradient of the discrete energy with respect to nodal positions.
pub fn energy_gradient(
    params: &MaterialParams,
    body: &ReferenceBody,
    def: &Deformation,
) -> Result<Vec<V2>, MaterialError> {
    if def.dets.iter().any(|&d| !(d > 0.0)) {
        return Err(MaterialError::InfiniteEnergy);
    }
    let mut g = vec![V2::zeros(); body.n_nodes()];
    for (t, tri) in body.triangles.iter().enumerate() {
        let s = params.stress(&def.grads[t]) * body.areas[t];
        for l in 0..3 {
            g[tri[l]] += s * body.shape_grads[t][l];
        }
    }
    let pm2 = params.p - 2.0;
    for m in 0..body.n_nodes() {
        let h = &def.hessian[m];
        let n2 = hess_norm2(h);
        if n2 == 0.0 {
            continue;
        }
        let f = params.eps_h * body.lumped[m] * params.p * n2.powf(0.5 * pm2);
        for (a, c) in body.hessian_stencil(m) {
            for i in 0..2 {
                let mut s = 0.0;
                for j in 0..2 {
                    for k in 0..2 {
                        s += h[i][j][k] * c[j][k];
                    }
                }
                g[*a][i] += f * s;
            }
        }
    }
    Ok(g)
}

/// Adds a positive semidefinite approximation of D²E to `add(dof, dof, v)`
/// where dof = 2·node + component. Element blocks are projected onto the
/// PSD cone; the second-gradient term is convex and kept exact.
pub fn energy_hessian(
    params: &MaterialParams,
    body: &ReferenceBody,
    def: &Deformation,
    add: &mut dyn FnMut(usize, usize, f64),
) {
    for (t, tri) in body.triangles.iter().enumerate() {
        let h4 = project_psd4(&density_hessian(params, &def.grads[t])) * body.areas[t];
        let g = &body.shape_grads[t];
        // column (a, k) of D holds δ_ik g_a[j] at row (i, j)
        let mut d = nalgebra::SMatrix::<f64, 4, 6>::zeros();
        for l in 0..3 {
            for k in 0..2 {
                for j in 0..2 {
                    d[(2 * k + j, 2 * l + k)] = g[l][j];
                }
            }
        }
        let he = d.transpose() * h4 * d;
        for r in 0..6 {
            for c in 0..6 {
                add(2 * tri[r / 2] + r % 2, 2 * tri[c / 2] + c % 2, he[(r, c)]);
            }
        }
    }
    let p = params.p;
    for m in 0..body.n_nodes() {
        let h = &def.hessian[m];
        let n2 = hess_norm2(h);
        if n2 == 0.0 {
            continue;
        }
        let w = params.eps_h * body.lumped[m];
        let alpha = w * p * n2.powf(0.5 * (p - 2.0));
        let beta = w * p * (p - 2.0) * n2.powf(0.5 * (p - 4.0));
        let st = body.hessian_stencil(m);
        // J^T h per (node, component)
        let jh: Vec<[f64; 2]> = st
            .iter()
            .map(|(_, c)| {
                let mut r = [0.0; 2];
                for (i, ri) in r.iter_mut().enumerate() {
                    for j in 0..2 {
                        for k in 0..2 {
                            *ri += h[i][j][k] * c[j][k];
                        }
                    }
                }
                r
            })
            .collect();
        for (x, (a, ca)) in st.iter().enumerate() {
            for (y, (b, cb)) in st.iter().enumerate() {
                let mut cc = 0.0;
                for j in 0..2 {
                    for k in 0..2 {
                        cc += ca[j][k] * cb[j][k];
                    }
                }
                for i in 0..2 {
                    for k in 0..2 {
                        let mut v = beta * jh[x][i] * jh[y][k];
                        if i == k {
                            v += alpha * cc;
                        }
                        add(2 * a + i, 2 * b + k, v);
                    }
                }
            }
        }
    }
}

fn element_velocity_gradient(body: &ReferenceBody, t: usize, b: &[V2]) -> M2 {
    crate::body::element_gradient(body, t, b)
}

/// R(η, b) = ν Σ |T| |∇bᵀ∇η + ∇ηᵀ∇b|².
pub fn dissipation(params: &MaterialParams, body: &ReferenceBody, eta: &Deformation, b: &[V2]) -> f64 {
    (0..body.triangles.len())
        .map(|t| {
            let bg = element_velocity_gradient(body, t, b);
            let g = &eta.grads[t];
            let s = bg.transpose() * g + g.transpose() * bg;
            params.nu * body.areas[t] * s.norm_squared()
        })
        .sum()
}

/// D₂R(η, b) as a nodal covector: Σ 4ν|T| (∇η S) g_a.
pub fn dissipation_gradient(
    params: &MaterialParams,
    body: &ReferenceBody,
    eta: &Deformation,
    b: &[V2],
) -> Vec<V2> {
    let mut out = vec![V2::zeros(); body.n_nodes()];
    for (t, tri) in body.triangles.iter().enumerate() {
        let bg = element_velocity_gradient(body, t, b);
        let g = &eta.grads[t];
        let s = bg.transpose() * g + g.transpose() * bg;
        let m = g * s * (4.0 * params.nu * body.areas[t]);
        for l in 0..3 {
            out[tri[l]] += m * body.shape_grads[t][l];
        }
    }
    out
}

/// Adds D₂²R (constant in b) scaled by `scale` to `add`.
pub fn dissipation_hessian(
    params: &MaterialParams,
    body: &ReferenceBody,
    eta: &Deformation,
    scale: f64,
    add: &mut dyn FnMut(usize, usize, f64),
) {
    for (t, tri) in body.triangles.iter().enumerate() {
        let g = &eta.grads[t];
        let sg = &body.shape_grads[t];
        let mut s = [M2::zeros(); 6];
        for l in 0..3 {
            for k in 0..2 {
                let mut phi = M2::zeros();
                phi[(k, 0)] = sg[l][0];
                phi[(k, 1)] = sg[l][1];
                s[2 * l + k] = phi.transpose() * g + g.transpose() * phi;
            }
        }
        let f = 2.0 * params.nu * body.areas[t] * scale;
        for r in 0..6 {
            for c in 0..6 {
                add(
                    2 * tri[r / 2] + r % 2,
                    2 * tri[c / 2] + c % 2,
                    f * s[r].component_mul(&s[c]).sum(),
                );
            }
        }
    }
}

/// Outcome of the numeric spot checks of the structural assumptions.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    /// Korn constant with the L² term and no boundary condition.
    pub korn_free: f64,
    /// Korn constant for fields vanishing on Γ (None when Γ is empty).
    pub korn_gamma: Option<f64>,
    /// Energy level used for the determinant bound.
    pub e0: f64,
    /// Barrier-implied lower bound on det ∇η in the sublevel set {E ≤ e0}.
    pub eps0: f64,
    /// Smallest det observed in sampled sublevel-set deformations.
    pub observed_min_det: f64,
    pub samples_in_sublevel: usize,
    pub energy_lower_bound_ok: bool,
}

fn mass_plus_stiffness(body: &ReferenceBody) -> DMatrix<f64> {
    let n = 2 * body.n_nodes();
    let mut m = DMatrix::zeros(n, n);
    for v in 0..body.n_nodes() {
        m[(2 * v, 2 * v)] += body.lumped[v];
        m[(2 * v + 1, 2 * v + 1)] += body.lumped[v];
    }
    for (t, tri) in body.triangles.iter().enumerate() {
        let g = &body.shape_grads[t];
        for x in 0..3 {
            for y in 0..3 {
                let v = body.areas[t] * g[x].dot(&g[y]);
                for i in 0..2 {
                    m[(2 * tri[x] + i, 2 * tri[y] + i)] += v;
                }
            }
        }
    }
    m
}

/// Smallest λ with A v = λ B v, B symmetric positive definite.
pub fn smallest_generalized_eigenvalue(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<f64> {
    let l = b.clone().cholesky()?.l();
    let linv = l.clone().try_inverse()?;
    let c = &linv * a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    eig.eigenvalues.iter().copied().reduce(f64::min)
}

fn restrict(m: &DMatrix<f64>, keep: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(keep.len(), keep.len(), |i, j| m[(keep[i], keep[j])])
}

/// Numeric checks of the determinant bound and the Korn inequalities at
/// the deformation `eta` (usually the identity).
pub fn assumption_audit(
    params: &MaterialParams,
    body: &ReferenceBody,
    eta: &Deformation,
    seed: u64,
) -> Result<AuditReport, MaterialError> {
    params.validate()?;
    let n = 2 * body.n_nodes();
    let mut kr = DMatrix::zeros(n, n);
    dissipation_hessian(params, body, eta, 0.5, &mut |i, j, v| kr[(i, j)] += v);
    let w12 = mass_plus_stiffness(body);
    let mut mass = DMatrix::zeros(n, n);
    for v in 0..body.n_nodes() {
        mass[(2 * v, 2 * v)] = body.lumped[v];
        mass[(2 * v + 1, 2 * v + 1)] = body.lumped[v];
    }
    let korn_free = smallest_generalized_eigenvalue(&(&kr + &mass), &w12).unwrap_or(f64::NAN);
    let korn_gamma = if body.gamma.is_empty() {
        None
    } else {
        let keep: Vec<usize> = (0..n).filter(|&d| !body.gamma_node[d / 2]).collect();
        smallest_generalized_eigenvalue(&restrict(&kr, &keep), &restrict(&w12, &keep))
    };
    if !(korn_free > 0.0) {
        return Err(MaterialError::AuditFailure {
            inequality: "Korn inequality with L2 term".into(),
            witness: format!("K_R = {korn_free:e}"),
        });
    }
    if let Some(k) = korn_gamma {
        if !(k > 0.0) {
            return Err(MaterialError::AuditFailure {
                inequality: "Korn inequality on fields vanishing on Gamma".into(),
                witness: format!("K_R = {k:e}"),
            });
        }
    }

    // det bound: c |T| det^{-q} <= E <= E0 gives det >= (c |T| / E0)^{1/q}
    let e0 = energy(params, body, eta) + 1.0;
    let amin = body.areas.iter().copied().fold(f64::INFINITY, f64::min);
    let eps0 = (params.c * amin / e0).powf(1.0 / params.q);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observed = f64::INFINITY;
    let mut count = 0;
    let mut lower_ok = true;
    let h = body.resolution;
    for s in 0..200 {
        let amp = h * 0.6 * (s as f64 + 1.0) / 200.0;
        let pos: Vec<V2> = eta
            .positions
            .iter()
            .map(|p| p + V2::new(rng.random_range(-amp..amp), rng.random_range(-amp..amp)))
            .collect();
        let d = crate::body::interpolate_gradient_and_hessian(body, pos);
        let e = energy(params, body, &d);
        if e < 0.0 {
            lower_ok = false;
        }
        if e <= e0 {
            count += 1;
            observed = observed.min(d.min_det());
            if d.min_det() < eps0 {
                return Err(MaterialError::AuditFailure {
                    inequality: "det bound on sublevel set".into(),
                    witness: format!("sample {s}: min det {:e} < eps0 {eps0:e}", d.min_det()),
                });
            }
        }
    }
    Ok(AuditReport {
        korn_free,
        korn_gamma,
        e0,
        eps0,
        observed_min_det: observed,
        samples_in_sublevel: count,
        energy_lower_bound_ok: lower_ok,
    })
}
