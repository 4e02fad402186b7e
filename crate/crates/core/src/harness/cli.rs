use super::{audit, builtin, run, HarnessError, Mode, Overrides, RunManifest, BUILTIN_NAMES};
use crate::body::io::{save_scenario, IoError};
use crate::cones::{
    polar_cone, push_forward_normal, push_forward_tangent,
    regular_tangent_cone_polys, tangent_cone_polys, PolyCone,
};
use crate::geom::{M2, V2};
use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "corner-contact", version, about = "Contact of viscoelastic solids with corners")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run scenarios (files or built-in names); with --mode audit, audit run directories.
    Run(RunArgs),
    /// Re-validate the artifacts of finished runs.
    Audit {
        dirs: Vec<PathBuf>,
    },
    /// List the built-in scenarios, or write them to --out.
    Scenarios {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the cone fixtures for a square corner and a reflex corner.
    Cones,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(required = true)]
    pub scenarios: Vec<String>,
    /// quasistatic, inertial, audit or cones-demo; defaults to the scenario's own mode.
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub pin_rigid_modes: bool,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

fn stem(source: &str) -> String {
    Path::new(source)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| source.to_string())
}

/// Runs every scenario, `jobs` at a time. Each scenario gets `out/<stem>`
/// when there is more than one.
fn run_all(a: &RunArgs, mode: Option<Mode>) -> Vec<(String, Result<String, HarnessError>)> {
    let manifests: Vec<RunManifest> = a
        .scenarios
        .iter()
        .map(|s| RunManifest {
            scenario: s.clone(),
            out: if a.scenarios.len() > 1 { a.out.join(stem(s)) } else { a.out.clone() },
            mode,
            seed: a.seed,
            overrides: Overrides {
                tau: a.tau,
                h: a.h,
                horizon: a.horizon,
                pin_rigid_modes: a.pin_rigid_modes,
            },
        })
        .collect();
    let jobs = a.jobs.max(1);
    let mut results = Vec::new();
    for chunk in manifests.chunks(jobs) {
        let done: Vec<_> = std::thread::scope(|s| {
            let hs: Vec<_> = chunk.iter().map(|m| s.spawn(move || run(m).map(|r| r.render()))).collect();
            hs.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
        });
        for (m, r) in chunk.iter().zip(done) {
            results.push((m.scenario.clone(), r));
        }
    }
    results
}

fn audit_dirs(dirs: &[PathBuf]) -> Result<String, HarnessError> {
    let mut s = String::new();
    let mut bad = Vec::new();
    for d in dirs {
        let a = audit(d)?;
        let _ = writeln!(
            s,
            "{}: steps {} sigma_files {} energy {} forces {}",
            d.display(),
            a.steps,
            a.sigma_files,
            if a.energy_ok { "PASS" } else { "FAIL" },
            if a.forces_ok { "PASS" } else { "FAIL" }
        );
        for f in &a.failures {
            let _ = writeln!(s, "  {f}");
        }
        if !a.ok() {
            bad.push(d.display().to_string());
        }
    }
    if bad.is_empty() {
        Ok(s)
    } else {
        print!("{s}");
        Err(HarnessError::Audit(format!("failed: {}", bad.join(", "))))
    }
}

fn fmt_cone(c: &PolyCone) -> String {
    if c.is_zero() {
        return "{0}".into();
    }
    if c.is_full() {
        return "R^2".into();
    }
    c.arcs()
        .iter()
        .map(|a| format!("[{:.2}°, {:.2}°]", a.start.to_degrees(), a.end().to_degrees()))
        .collect::<Vec<_>>()
        .join(" ∪ ")
}

/// Tangent, regular tangent and convexified normal cones at a square
/// corner and at the reflex corner of an L, before and after a shear.
pub fn cones_demo() -> String {
    let square = vec![vec![V2::new(0.0, 0.0), V2::new(1.0, 0.0), V2::new(1.0, 1.0), V2::new(0.0, 1.0)]];
    let l = vec![vec![
        V2::new(0.0, 0.0),
        V2::new(2.0, 0.0),
        V2::new(2.0, 1.0),
        V2::new(1.0, 1.0),
        V2::new(1.0, 2.0),
        V2::new(0.0, 2.0),
    ]];
    let f = M2::new(1.0, 0.5, 0.0, 1.0);
    let mut s = String::new();
    for (name, polys, x) in [("square corner", &square, V2::new(0.0, 0.0)), ("L reflex corner", &l, V2::new(1.0, 1.0))] {
        let t = tangent_cone_polys(polys, &x).expect("fixture vertex");
        let th = regular_tangent_cone_polys(polys, &x).expect("fixture vertex");
        let nh = polar_cone(&th);
        let _ = writeln!(s, "{name} at ({}, {}):", x.x, x.y);
        let _ = writeln!(s, "  T      = {}", fmt_cone(&t));
        let _ = writeln!(s, "  T_reg  = {}", fmt_cone(&th));
        let _ = writeln!(s, "  N_conv = {}", fmt_cone(&nh));
        let ft = push_forward_tangent(&th, &f).expect("invertible shear");
        let fnh = push_forward_normal(&nh, &f).expect("invertible shear");
        let _ = writeln!(s, "  under F = [[1, 0.5], [0, 1]]:");
        let _ = writeln!(s, "    F T_reg      = {}", fmt_cone(&ft));
        let _ = writeln!(s, "    cof F N_conv = {}", fmt_cone(&fnh));
        let _ = writeln!(s, "    polar(F T_reg) = {}", fmt_cone(&polar_cone(&ft)));
    }
    s
}

fn write_builtins(out: &Option<PathBuf>) -> Result<String, HarnessError> {
    let mut s = String::new();
    for name in BUILTIN_NAMES {
        let cfg = builtin(name).expect("builtin name");
        match out {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| IoError::Io { path: dir.display().to_string(), source: e })?;
                let p = dir.join(format!("{name}.scn"));
                save_scenario(&cfg, &p)?;
                let _ = writeln!(s, "{}", p.display());
            }
            None => {
                let _ = writeln!(s, "{name}\t{}", cfg.mode);
            }
        }
    }
    Ok(s)
}

fn execute(cli: Cli) -> Result<(String, bool), (HarnessError, Option<String>)> {
    run_command(cli.command).map_err(|e| match e {
        Failed::Plain(e) => (e, None),
        Failed::In(name, e) => (e, Some(name)),
    })
}

enum Failed {
    Plain(HarnessError),
    In(String, HarnessError),
}

impl From<HarnessError> for Failed {
    fn from(e: HarnessError) -> Self {
        Failed::Plain(e)
    }
}

fn run_command(command: Command) -> Result<(String, bool), Failed> {
    match command {
        Command::Run(a) => {
            let mode = match &a.mode {
                Some(m) => Some(Mode::parse(m).ok_or_else(|| HarnessError::Usage(format!("unknown mode '{m}'")))?),
                None => None,
            };
            match mode {
                Some(Mode::Audit) => {
                    let dirs: Vec<PathBuf> = a.scenarios.iter().map(PathBuf::from).collect();
                    Ok((audit_dirs(&dirs)?, true))
                }
                Some(Mode::ConesDemo) => Ok((cones_demo(), true)),
                _ => {
                    let mut text = String::new();
                    let mut all_pass = true;
                    for (name, r) in run_all(&a, mode) {
                        match r {
                            Ok(summary) => {
                                all_pass &= summary.contains("verdict: PASS");
                                text.push_str(&summary);
                            }
                            Err(e) => {
                                print!("{text}");
                                return Err(Failed::In(name, e));
                            }
                        }
                    }
                    Ok((text, all_pass))
                }
            }
        }
        Command::Audit { dirs } => Ok((audit_dirs(&dirs)?, true)),
        Command::Scenarios { out } => Ok((write_builtins(&out)?, true)),
        Command::Cones => Ok((cones_demo(), true)),
    }
}

/// Parses arguments, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok((text, pass)) => {
            print!("{text}");
            if pass {
                0
            } else {
                1
            }
        }
        Err((e, scenario)) => {
            eprint!("{}", e.block_with(scenario.as_deref()));
            e.exit_code()
        }
    }
}
