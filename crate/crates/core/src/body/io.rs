//! Scenario files, snapshots and trace CSVs.
//!
//! A scenario file is the header line `corner-contact-scenario v1`
//! followed by a TOML body. Unknown keys are rejected so typos surface as
//! parse errors instead of silently taking defaults.

use super::{build_mesh, BodyError, Container, Deformation, HalfPlane, ReferenceBody};
use crate::geom::V2;
use crate::material::MaterialParams;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use thiserror::Error;

pub const HEADER: &str = "corner-contact-scenario v1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("ParseError at line {line}: {field}: {message}")]
    ParseError {
        line: usize,
        field: String,
        message: String,
    },
    #[error("SchemaVersionMismatch: expected '{HEADER}', found '{found}'")]
    SchemaVersionMismatch { found: String },
    #[error("ValidationError: {0}")]
    Validation(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    /// Counter-clockwise polygons, one per component.
    pub components: Vec<Vec<[f64; 2]>>,
    /// Dirichlet edges as [component, polygon edge].
    #[serde(default)]
    pub gamma: Vec<[usize; 2]>,
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfPlaneSpec {
    pub point: [f64; 2],
    pub normal: [f64; 2],
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainerSpec {
    #[serde(default)]
    pub half_planes: Vec<HalfPlaneSpec>,
    /// Counter-clockwise polygon; empty means no polygonal container.
    #[serde(default)]
    pub polygon: Vec<[f64; 2]>,
}

/// One load term: a force density per unit reference area, optionally
/// restricted to one component and ramped linearly from 0 at `ramp[0]` to
/// full strength at `ramp[1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadTerm {
    pub density: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSpec {
    /// Gravitational acceleration; contributes ρ·g per unit area.
    #[serde(default)]
    pub gravity: [f64; 2],
    #[serde(default)]
    pub terms: Vec<LoadTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default)]
    pub rho: f64,
    pub tau: f64,
    pub h: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

/// η₀ is the identity moved by a per-component offset; η* is a
/// per-component rigid velocity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default)]
    pub offsets: Vec<[f64; 2]>,
    #[serde(default)]
    pub velocities: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub delta_det: f64,
    /// Ciarlet–Nečas tolerance relative to total area.
    pub tol_cn_rel: f64,
    /// Energy slack tolerance relative to E(η₀) + 1.
    pub tol_energy_rel: f64,
    /// Barrier activation distance relative to the body diameter.
    pub d_hat_rel: f64,
    /// Contact set distance relative to the body diameter.
    pub tol_contact_rel: f64,
    /// Gradient tolerance relative to (a + c)·diam·resolution.
    pub tol_grad_rel: f64,
    pub armijo: f64,
    pub shrink: f64,
    pub max_iter: usize,
    pub tol_ar: f64,
    pub angle_tol: f64,
    /// Allowed angular deviation of −g from N̂ when validating forces.
    pub direction_tol: f64,
    /// Barrier stiffness relative to (a + c)·diam.
    pub kappa_rel: f64,
    /// Local injectivity radius scale relative to the diameter.
    pub r_loc_rel: f64,
    pub angle_floor: f64,
    pub theta_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            delta_det: 1e-4,
            tol_cn_rel: 1e-8,
            tol_energy_rel: 1e-6,
            d_hat_rel: 1e-3,
            tol_contact_rel: 1e-3,
            tol_grad_rel: 1e-8,
            armijo: 1e-4,
            shrink: 0.5,
            max_iter: 500,
            tol_ar: 1e-3,
            angle_tol: 1e-8,
            direction_tol: 5f64.to_radians(),
            kappa_rel: 1e-2,
            r_loc_rel: 2e-2,
            angle_floor: 1e-3,
            theta_floor: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    /// Preferred mode when the CLI does not override it.
    #[serde(default = "default_mode")]
    pub mode: String,
    /// Fix translation and rotation by pinning two nodes.
    #[serde(default)]
    pub pin_rigid_modes: bool,
    pub body: BodySpec,
    #[serde(default)]
    pub container: ContainerSpec,
    #[serde(default)]
    pub material: MaterialParams,
    #[serde(default)]
    pub load: LoadSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_mode() -> String {
    "quasistatic".into()
}

fn pts(v: &[[f64; 2]]) -> Vec<V2> {
    v.iter().map(|p| V2::new(p[0], p[1])).collect()
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), IoError> {
        let t = &self.time;
        let bad = |s: String| Err(IoError::Validation(s));
        if !(t.tau > 0.0) {
            return bad(format!("tau must be positive (tau = {})", t.tau));
        }
        if t.tau > t.h * (1.0 + 1e-12) {
            return bad(format!("tau <= h violated (tau = {}, h = {})", t.tau, t.h));
        }
        if !divides(t.tau, t.h) {
            return bad(format!("tau must divide h (tau = {}, h = {})", t.tau, t.h));
        }
        if !divides(t.h, t.horizon) {
            return bad(format!("h must divide T (h = {}, T = {})", t.h, t.horizon));
        }
        if !(t.rho >= 0.0) {
            return bad(format!("rho >= 0 violated (rho = {})", t.rho));
        }
        self.material
            .validate()
            .map_err(|e| IoError::Validation(e.to_string()))?;
        let nc = self.body.components.len();
        if nc == 0 {
            return bad("body needs at least one component".into());
        }
        if !self.initial.offsets.is_empty() && self.initial.offsets.len() != nc {
            return bad("initial.offsets needs one entry per component".into());
        }
        if !self.initial.velocities.is_empty() && self.initial.velocities.len() != nc {
            return bad("initial.velocities needs one entry per component".into());
        }
        for term in &self.load.terms {
            if term.component.is_some_and(|c| c >= nc) {
                return bad("load term refers to a missing component".into());
            }
            if let Some([a, b]) = term.ramp {
                if !(b >= a) {
                    return bad("load ramp end precedes start".into());
                }
            }
        }
        for h in &self.container.half_planes {
            if h.normal[0] == 0.0 && h.normal[1] == 0.0 {
                return bad("half-plane normal is zero".into());
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.time.horizon / self.time.tau).round() as usize
    }

    pub fn steps_per_interval(&self) -> usize {
        (self.time.h / self.time.tau).round() as usize
    }

    pub fn build_body(&self) -> Result<ReferenceBody, BodyError> {
        let polys: Vec<Vec<V2>> = self.body.components.iter().map(|c| pts(c)).collect();
        let gamma: Vec<(usize, usize)> = self.body.gamma.iter().map(|g| (g[0], g[1])).collect();
        build_mesh(&polys, &gamma, self.body.resolution)
    }

    pub fn container(&self) -> Container {
        if !self.container.polygon.is_empty() {
            Container::Polygon(pts(&self.container.polygon))
        } else if !self.container.half_planes.is_empty() {
            Container::HalfPlanes(
                self.container
                    .half_planes
                    .iter()
                    .map(|h| HalfPlane {
                        point: V2::new(h.point[0], h.point[1]),
                        normal: V2::new(h.normal[0], h.normal[1]).normalize(),
                    })
                    .collect(),
            )
        } else {
            Container::Unbounded
        }
    }

    pub fn initial_positions(&self, body: &ReferenceBody) -> Vec<V2> {
        body.nodes
            .iter()
            .enumerate()
            .map(|(v, p)| {
                let c = body.node_component[v];
                match self.initial.offsets.get(c) {
                    Some(o) => p + V2::new(o[0], o[1]),
                    None => *p,
                }
            })
            .collect()
    }

    pub fn initial_velocity(&self, body: &ReferenceBody) -> Vec<V2> {
        (0..body.n_nodes())
            .map(|v| match self.initial.velocities.get(body.node_component[v]) {
                Some(w) => V2::new(w[0], w[1]),
                None => V2::zeros(),
            })
            .collect()
    }

    /// Time average of the load density over [t0, t1] at every node.
    pub fn averaged_load(&self, body: &ReferenceBody, t0: f64, t1: f64) -> Vec<V2> {
        let g = V2::new(self.load.gravity[0], self.load.gravity[1]) * self.time.rho;
        let mut out = vec![g; body.n_nodes()];
        for term in &self.load.terms {
            let s = ramp_average(term.ramp, t0, t1);
            let d = V2::new(term.density[0], term.density[1]) * s;
            for (v, f) in out.iter_mut().enumerate() {
                if term.component.map_or(true, |c| c == body.node_component[v]) {
                    *f += d;
                }
            }
        }
        out
    }
}

fn divides(a: f64, b: f64) -> bool {
    let r = b / a;
    (r - r.round()).abs() <= 1e-9 * r.max(1.0) && r.round() >= 1.0
}

fn ramp_value(ramp: Option<[f64; 2]>, t: f64) -> f64 {
    match ramp {
        None => 1.0,
        Some([a, b]) => {
            if t <= a {
                0.0
            } else if t >= b {
                1.0
            } else {
                (t - a) / (b - a)
            }
        }
    }
}

/// Exact mean of a piecewise-linear ramp over [t0, t1].
fn ramp_average(ramp: Option<[f64; 2]>, t0: f64, t1: f64) -> f64 {
    let Some([a, b]) = ramp else { return 1.0 };
    if t1 <= t0 {
        return ramp_value(ramp, t0);
    }
    let mut knots = vec![t0, t1];
    for k in [a, b] {
        if k > t0 && k < t1 {
            knots.push(k);
        }
    }
    knots.sort_by(f64::total_cmp);
    let mut acc = 0.0;
    for w in knots.windows(2) {
        acc += 0.5 * (ramp_value(ramp, w[0]) + ramp_value(ramp, w[1])) * (w[1] - w[0]);
    }
    acc / (t1 - t0)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, IoError> {
    let (first, rest) = match text.find('\n') {
        Some(i) => (&text[..i], &text[i + 1..]),
        None => (text, ""),
    };
    let first = first.trim();
    if first != HEADER {
        if first.starts_with("corner-contact-scenario") {
            return Err(IoError::SchemaVersionMismatch {
                found: first.to_string(),
            });
        }
        return Err(IoError::ParseError {
            line: 1,
            field: "header".into(),
            message: format!("expected '{HEADER}'"),
        });
    }
    let cfg: ScenarioConfig = toml::from_str(rest).map_err(|e| {
        let line = e.span().map_or(0, |s| line_of(rest, s.start)) + 1;
        let msg = e.message().to_string();
        let field = msg
            .split('`')
            .nth(1)
            .unwrap_or("document")
            .to_string();
        IoError::ParseError {
            line,
            field,
            message: msg,
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::ParseError {
        line: 0,
        field: "path".into(),
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_scenario(&text)
}

pub fn scenario_to_string(cfg: &ScenarioConfig) -> String {
    let body = toml::to_string(cfg).expect("scenario serializes");
    format!("{HEADER}\n{body}")
}

pub fn save_scenario(cfg: &ScenarioConfig, path: &Path) -> Result<(), IoError> {
    fs::write(path, scenario_to_string(cfg)).map_err(|e| IoError::io(path, e))
}

pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn snapshot_path(dir: &Path, step: usize) -> std::path::PathBuf {
    dir.join(format!("frame_{step:06}.csv"))
}

pub fn save_snapshot(def: &Deformation, step: usize, dir: &Path) -> Result<(), IoError> {
    let mut s = String::from("node_id,x,y\n");
    for (i, p) in def.positions.iter().enumerate() {
        let _ = writeln!(s, "{i},{},{}", fmt_f(p.x), fmt_f(p.y));
    }
    let path = snapshot_path(dir, step);
    fs::write(&path, s).map_err(|e| IoError::io(&path, e))
}

pub fn load_snapshot(path: &Path) -> Result<Vec<V2>, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let parse = |s: &str, field: &str| {
            s.trim().parse::<f64>().map_err(|e| IoError::ParseError {
                line: ln + 1,
                field: field.into(),
                message: e.to_string(),
            })
        };
        if f.len() != 3 {
            return Err(IoError::ParseError {
                line: ln + 1,
                field: "row".into(),
                message: "expected node_id,x,y".into(),
            });
        }
        out.push(V2::new(parse(f[1], "x")?, parse(f[2], "y")?));
    }
    Ok(out)
}

pub const TRACE_HEADER: &str = "step,t,E,kinetic,dissipation,work,slack_qs,slack_td,min_det,min_gap,overlap_defect,total_sigma_x,total_sigma_y";

/// One trace row. Dissipation and work are cumulative.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TraceRecord {
    pub step: usize,
    pub t: f64,
    pub energy: f64,
    pub kinetic: f64,
    pub dissipation: f64,
    pub work: f64,
    pub slack_qs: f64,
    pub slack_td: f64,
    pub min_det: f64,
    pub min_gap: f64,
    pub overlap_defect: f64,
    pub total_sigma: [f64; 2],
}

impl TraceRecord {
    pub fn to_csv(&self) -> String {
        let v = [
            self.t,
            self.energy,
            self.kinetic,
            self.dissipation,
            self.work,
            self.slack_qs,
            self.slack_td,
            self.min_det,
            self.min_gap,
            self.overlap_defect,
            self.total_sigma[0],
            self.total_sigma[1],
        ];
        let mut s = self.step.to_string();
        for x in v {
            s.push(',');
            s.push_str(&fmt_f(x));
        }
        s
    }

    pub fn from_csv(line: &str) -> Option<Self> {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 13 {
            return None;
        }
        let x = |i: usize| f[i].trim().parse::<f64>().ok();
        Some(TraceRecord {
            step: f[0].trim().parse().ok()?,
            t: x(1)?,
            energy: x(2)?,
            kinetic: x(3)?,
            dissipation: x(4)?,
            work: x(5)?,
            slack_qs: x(6)?,
            slack_td: x(7)?,
            min_det: x(8)?,
            min_gap: x(9)?,
            overlap_defect: x(10)?,
            total_sigma: [x(11)?, x(12)?],
        })
    }
}

pub fn append_trace(record: &TraceRecord, path: &Path) -> Result<(), IoError> {
    let fresh = !path.exists();
    let mut f = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| IoError::io(path, e))?;
    let mut s = String::new();
    if fresh {
        s.push_str(TRACE_HEADER);
        s.push('\n');
    }
    s.push_str(&record.to_csv());
    s.push('\n');
    f.write_all(s.as_bytes()).map_err(|e| IoError::io(path, e))
}

pub fn load_trace(path: &Path) -> Result<Vec<TraceRecord>, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    text.lines()
        .enumerate()
        .skip(1)
        .map(|(i, l)| {
            TraceRecord::from_csv(l).ok_or_else(|| IoError::ParseError {
                line: i + 1,
                field: "trace row".into(),
                message: "malformed".into(),
            })
        })
        .collect()
}
