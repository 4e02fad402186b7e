//! Command-line front end: built-in scenarios, runs, audits.

pub mod cli;
pub mod scenarios;

pub use scenarios::{builtin, builtin_scenarios, BUILTIN_NAMES};

use crate::body::io::{
    append_trace, fmt_f, load_scenario, load_snapshot, load_trace, save_scenario, save_snapshot,
    IoError, ScenarioConfig,
};
use crate::body::interpolate_gradient_and_hessian;
use crate::contact::{
    contact_set, uniformly_interior_field, validate_contact_force, ContactForce, ContactKind,
    ForceAtom, Pairing,
};
use crate::geom::V2;
use crate::material::assumption_audit;
use crate::solver::{
    contact_force_bound, energy_report, quasistatic_solve, time_delayed_solve, Model, SolveOutput,
    SolverError,
};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("AuditFailure: {0}")]
    Audit(String),
    #[error("UsageError: {0}")]
    Usage(String),
}

impl HarnessError {
    pub fn kind(&self) -> &'static str {
        match self {
            HarnessError::Io(IoError::ParseError { .. }) => "ParseError",
            HarnessError::Io(IoError::SchemaVersionMismatch { .. }) => "SchemaVersionMismatch",
            HarnessError::Io(IoError::Validation(_)) => "ValidationError",
            HarnessError::Io(IoError::Io { .. }) => "IoError",
            HarnessError::Solver(SolverError::Unconstrained) => "Unconstrained",
            HarnessError::Solver(SolverError::StepFailure { .. }) => "StepFailure",
            HarnessError::Solver(_) => "SolverError",
            HarnessError::Audit(_) => "AuditFailure",
            HarnessError::Usage(_) => "UsageError",
        }
    }

    /// 2 for malformed input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Io(IoError::Io { .. }) => 1,
            HarnessError::Io(_) | HarnessError::Usage(_) => 2,
            _ => 1,
        }
    }

    /// Machine-readable error block.
    pub fn block(&self) -> String {
        self.block_with(None)
    }

    pub fn block_with(&self, scenario: Option<&str>) -> String {
        let msg = self.to_string().replace('\\', "\\\\").replace('"', "\\\"");
        let mut s = format!("error {{\n  kind: \"{}\"\n  message: \"{}\"\n", self.kind(), msg);
        if let Some(name) = scenario {
            let _ = writeln!(s, "  scenario: \"{}\"", name.replace('"', "\\\""));
        }
        if let HarnessError::Solver(SolverError::StepFailure { step, t, .. }) = self {
            let _ = writeln!(s, "  step: {step}\n  t: {t}");
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Quasistatic,
    Inertial,
    Audit,
    ConesDemo,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "quasistatic" => Some(Mode::Quasistatic),
            "inertial" => Some(Mode::Inertial),
            "audit" => Some(Mode::Audit),
            "cones-demo" | "cones" => Some(Mode::ConesDemo),
            _ => None,
        }
    }
}

/// Overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub tau: Option<f64>,
    pub h: Option<f64>,
    pub horizon: Option<f64>,
    pub pin_rigid_modes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    /// A scenario file, or the name of a built-in scenario.
    pub scenario: String,
    pub out: PathBuf,
    /// None means the scenario's own mode.
    pub mode: Option<Mode>,
    pub seed: u64,
    pub overrides: Overrides,
}

/// Resolves a path or built-in name to a validated scenario.
pub fn resolve_scenario(source: &str, ov: &Overrides) -> Result<ScenarioConfig, HarnessError> {
    let path = Path::new(source);
    let mut cfg = if path.exists() {
        load_scenario(path)?
    } else if let Some(c) = builtin(source) {
        c
    } else {
        return Err(HarnessError::Io(IoError::ParseError {
            line: 0,
            field: "scenario".into(),
            message: format!("no such scenario file or built-in: {source}"),
        }));
    };
    if let Some(t) = ov.tau {
        cfg.time.tau = t;
    }
    if let Some(h) = ov.h {
        cfg.time.h = h;
    }
    if let Some(t) = ov.horizon {
        cfg.time.horizon = t;
    }
    if ov.pin_rigid_modes {
        cfg.pin_rigid_modes = true;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub name: String,
    pub mode: Mode,
    pub steps: usize,
    pub energy_ok: bool,
    pub worst_slack_qs: f64,
    pub worst_slack_td: f64,
    pub min_det: f64,
    pub max_defect: f64,
    pub min_gap: f64,
    pub forces_ok: bool,
    pub feasibility_ok: bool,
    /// Inclusive step ranges with at least one contact event.
    pub episodes: Vec<(usize, usize)>,
    pub verdict: bool,
}

impl RunSummary {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.name);
        let _ = writeln!(s, "mode: {:?}", self.mode);
        let _ = writeln!(s, "steps: {}", self.steps);
        let _ = writeln!(s, "worst_slack_qs: {}", fmt_f(self.worst_slack_qs));
        let _ = writeln!(s, "worst_slack_td: {}", fmt_f(self.worst_slack_td));
        let _ = writeln!(s, "energy: {}", pass(self.energy_ok));
        let _ = writeln!(s, "min_det: {}", fmt_f(self.min_det));
        let _ = writeln!(s, "max_overlap_defect: {}", fmt_f(self.max_defect));
        let _ = writeln!(s, "min_gap: {}", fmt_f(self.min_gap));
        let _ = writeln!(s, "feasibility: {}", pass(self.feasibility_ok));
        let _ = writeln!(s, "contact_forces: {}", pass(self.forces_ok));
        let eps: Vec<String> = self.episodes.iter().map(|(a, b)| format!("{a}-{b}")).collect();
        let _ = writeln!(s, "contact_episodes: {}", if eps.is_empty() { "none".into() } else { eps.join(",") });
        let _ = writeln!(s, "verdict: {}", pass(self.verdict));
        s
    }
}

fn pass(b: bool) -> &'static str {
    if b {
        "PASS"
    } else {
        "FAIL"
    }
}

fn episodes(out: &SolveOutput) -> Vec<(usize, usize)> {
    let mut eps: Vec<(usize, usize)> = Vec::new();
    for d in &out.diagnostics {
        if d.n_events == 0 {
            continue;
        }
        match eps.last_mut() {
            Some((_, b)) if *b + 1 == d.step => *b = d.step,
            _ => eps.push((d.step, d.step)),
        }
    }
    eps
}

pub fn summarize(name: &str, mode: Mode, out: &SolveOutput) -> RunSummary {
    let tol = &out.model.tol;
    let rep = energy_report(&out.trace, out.inertial, tol.tol_energy);
    let min_det = out.trace.iter().map(|r| r.min_det).fold(f64::INFINITY, f64::min);
    let max_defect = out.trace.iter().map(|r| r.overlap_defect).fold(0.0, f64::max);
    let min_gap = out.trace.iter().map(|r| r.min_gap).fold(f64::INFINITY, f64::min);
    let feasibility_ok = min_det >= tol.delta_det && max_defect <= tol.tol_cn && min_gap >= -tol.tol_contact;
    let forces_ok = out.forces_ok();
    RunSummary {
        name: name.to_string(),
        mode,
        steps: out.diagnostics.len(),
        energy_ok: rep.ok(),
        worst_slack_qs: rep.worst_qs,
        worst_slack_td: rep.worst_td,
        min_det,
        max_defect,
        min_gap,
        forces_ok,
        feasibility_ok,
        episodes: episodes(out),
        verdict: rep.ok() && forces_ok && feasibility_ok,
    }
}

pub fn sigma_path(dir: &Path, step: usize) -> PathBuf {
    dir.join(format!("sigma_{step:06}.csv"))
}

const SIGMA_HEADER: &str = "node_id,fx,fy,weight,gap,kind,obstacle_x,obstacle_y";

pub fn save_sigma(sigma: &ContactForce, dir: &Path) -> Result<(), IoError> {
    let mut s = String::from(SIGMA_HEADER);
    s.push('\n');
    for a in &sigma.atoms {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            a.node,
            fmt_f(a.force.x),
            fmt_f(a.force.y),
            fmt_f(a.weight),
            fmt_f(a.gap),
            a.kind.label(),
            fmt_f(a.obstacle_part.x),
            fmt_f(a.obstacle_part.y)
        );
    }
    let path = sigma_path(dir, sigma.step);
    fs::write(&path, s).map_err(|e| IoError::Io { path: path.display().to_string(), source: e })
}

pub fn load_sigma(path: &Path, step: usize) -> Result<ContactForce, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::Io { path: path.display().to_string(), source: e })?;
    let mut atoms = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let bad = |field: &str| IoError::ParseError {
            line: i + 1,
            field: field.into(),
            message: "malformed sigma row".into(),
        };
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(bad("row"));
        }
        let x = |k: usize, name: &str| f[k].trim().parse::<f64>().map_err(|_| bad(name));
        atoms.push(ForceAtom {
            node: f[0].trim().parse().map_err(|_| bad("node_id"))?,
            force: V2::new(x(1, "fx")?, x(2, "fy")?),
            weight: x(3, "weight")?,
            gap: x(4, "gap")?,
            kind: match f[5].trim() {
                "obstacle" => ContactKind::Obstacle,
                "self" => ContactKind::SelfContact,
                _ => return Err(bad("kind")),
            },
            obstacle_part: V2::new(x(6, "obstacle_x")?, x(7, "obstacle_y")?),
        });
    }
    Ok(ContactForce { atoms, step })
}

/// Runs one scenario and writes trace.csv, frame_*.csv, sigma_*.csv,
/// scenario.scn and summary.txt into `manifest.out`.
pub fn run(manifest: &RunManifest) -> Result<RunSummary, HarnessError> {
    let cfg = resolve_scenario(&manifest.scenario, &manifest.overrides)?;
    let mode = match manifest.mode {
        Some(m) => m,
        None => Mode::parse(&cfg.mode).ok_or_else(|| HarnessError::Usage(format!("unknown mode '{}'", cfg.mode)))?,
    };
    let out = match mode {
        Mode::Quasistatic => quasistatic_solve(&cfg)?,
        Mode::Inertial => time_delayed_solve(&cfg)?,
        Mode::Audit | Mode::ConesDemo => {
            return Err(HarnessError::Usage("run needs quasistatic or inertial mode".into()))
        }
    };
    let dir = &manifest.out;
    fs::create_dir_all(dir).map_err(|e| IoError::Io { path: dir.display().to_string(), source: e })?;
    let mut run_cfg = cfg.clone();
    run_cfg.mode = if mode == Mode::Inertial { "inertial" } else { "quasistatic" }.into();
    save_scenario(&run_cfg, &dir.join("scenario.scn"))?;
    let trace_path = dir.join("trace.csv");
    if trace_path.exists() {
        fs::remove_file(&trace_path).map_err(|e| IoError::Io { path: trace_path.display().to_string(), source: e })?;
    }
    for r in &out.trace {
        append_trace(r, &trace_path)?;
    }
    for (k, pos) in out.frames.iter().enumerate() {
        let def = interpolate_gradient_and_hessian(&out.model.body, pos.clone());
        save_snapshot(&def, k, dir)?;
    }
    for s in &out.sigmas {
        save_sigma(s, dir)?;
    }
    let summary = summarize(&cfg.name, mode, &out);
    let mut text = summary.render();
    let body = &out.model.body;
    let def0 = interpolate_gradient_and_hessian(body, out.frames[0].clone());
    match assumption_audit(&cfg.material, body, &def0, manifest.seed) {
        Ok(a) => {
            let _ = writeln!(text, "seed: {}", manifest.seed);
            let _ = writeln!(text, "korn_free: {}", fmt_f(a.korn_free));
            let _ = writeln!(text, "energy_lower_bound: {}", pass(a.energy_lower_bound_ok));
        }
        Err(e) => {
            let _ = writeln!(text, "assumption_audit: {e}");
        }
    }
    fs::write(dir.join("summary.txt"), text).map_err(|e| IoError::Io { path: dir.display().to_string(), source: e })?;
    Ok(summary)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditSummary {
    pub steps: usize,
    pub sigma_files: usize,
    pub energy_ok: bool,
    pub forces_ok: bool,
    pub failures: Vec<String>,
}

impl AuditSummary {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-validates the artifacts of a finished run: energy slacks from the
/// trace, and every σ file against the contact set recomputed from its
/// frame.
pub fn audit(dir: &Path) -> Result<AuditSummary, HarnessError> {
    let cfg = load_scenario(&dir.join("scenario.scn"))?;
    let inertial = cfg.mode == "inertial";
    let (model, _) = Model::from_config(&cfg, inertial)?;
    let trace = load_trace(&dir.join("trace.csv"))?;
    let rep = energy_report(&trace, inertial, model.tol.tol_energy);
    let mut failures: Vec<String> = rep
        .violations
        .iter()
        .map(|v| format!("step {}: {} slack {}", v.step, v.kind, fmt_f(v.value)))
        .collect();
    let body = &model.body;
    let mut sigma_files = 0;
    let mut forces_ok = true;
    for r in trace.iter().skip(1) {
        let k = r.step;
        let frame = crate::body::io::snapshot_path(dir, k);
        let pos = load_snapshot(&frame)?;
        if pos.len() != body.n_nodes() {
            return Err(HarnessError::Audit(format!("frame {k} has {} nodes, mesh has {}", pos.len(), body.n_nodes())));
        }
        let def = interpolate_gradient_and_hessian(body, pos);
        if def.min_det() < model.tol.delta_det {
            failures.push(format!("step {k}: min det {}", fmt_f(def.min_det())));
        }
        let sp = sigma_path(dir, k);
        if !sp.exists() {
            failures.push(format!("step {k}: missing sigma file"));
            forces_ok = false;
            continue;
        }
        sigma_files += 1;
        let sigma = load_sigma(&sp, k)?;
        let events = contact_set(body, &def, &model.container, &model.geometry, model.tol.tol_contact);
        let pairing = Pairing::from_events(body, &events);
        let fr = validate_contact_force(
            &sigma,
            body,
            &def,
            &events,
            &pairing,
            model.tol.direction_tol,
            model.tol.tol_ar,
        );
        if !fr.ok() {
            forces_ok = false;
            failures.push(format!("step {k}: contact force report {fr:?}"));
        }
        match uniformly_interior_field(body, &def, model.tol.theta_floor) {
            Ok(field) => {
                if let Err(e) = contact_force_bound(&sigma, &field) {
                    forces_ok = false;
                    failures.push(format!("step {k}: {e}"));
                }
            }
            Err(e) => {
                forces_ok = false;
                failures.push(format!("step {k}: {e}"));
            }
        }
    }
    Ok(AuditSummary { steps: trace.len().saturating_sub(1), sigma_files, energy_ok: rep.ok(), forces_ok, failures })
}
