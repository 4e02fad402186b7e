//! Built-in scenario library.

use crate::body::io::{
    BodySpec, ContainerSpec, HalfPlaneSpec, InitialSpec, LoadSpec, LoadTerm, ScenarioConfig,
    TimeSpec, Tolerances,
};
use crate::material::MaterialParams;

pub const BUILTIN_NAMES: [&str; 4] = ["bounce", "squeeze", "corner-glide", "l-notch"];

fn square(x: f64, y: f64) -> Vec<[f64; 2]> {
    vec![[x, y], [x + 1.0, y], [x + 1.0, y + 1.0], [x, y + 1.0]]
}

fn floor() -> ContainerSpec {
    ContainerSpec {
        half_planes: vec![HalfPlaneSpec { point: [0.0, 0.0], normal: [0.0, 1.0] }],
        polygon: vec![],
    }
}

fn base(name: &str, mode: &str, body: BodySpec, time: TimeSpec) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        mode: mode.into(),
        pin_rigid_modes: false,
        body,
        container: ContainerSpec::default(),
        material: MaterialParams::stress_free(1.0, 4.0, 1e-3, 4.0, 1.0),
        load: LoadSpec::default(),
        time,
        initial: InitialSpec::default(),
        tolerances: Tolerances::default(),
    }
}

/// A unit square falling onto the floor y ≥ 0 with unit downward speed.
pub fn bounce() -> ScenarioConfig {
    let mut s = base(
        "bounce",
        "inertial",
        BodySpec { components: vec![square(0.0, 0.02)], gamma: vec![], resolution: 0.25 },
        TimeSpec { rho: 1.0, tau: 0.0025, h: 0.01, horizon: 0.4 },
    );
    s.material = MaterialParams::stress_free(100.0, 4.0, 1e-3, 4.0, 0.01);
    s.container = floor();
    s.load.gravity = [0.0, -1.0];
    s.initial.velocities = vec![[0.0, -1.0]];
    s
}

/// A unit square pressed head-on into the middle of the face of a square
/// of side 1.5, 0.005 apart, both clamped on their outer edges. The pair is
/// mirror symmetric about y = 1/2. Equal squares would meet corner to
/// corner, and that configuration buckles sideways under the barrier.
pub fn squeeze() -> ScenarioConfig {
    let mut s = base(
        "squeeze",
        "quasistatic",
        BodySpec {
            components: vec![
                square(0.0, 0.0),
                vec![[1.005, -0.25], [2.505, -0.25], [2.505, 1.25], [1.005, 1.25]],
            ],
            gamma: vec![[0, 3], [1, 1]],
            resolution: 0.25,
        },
        TimeSpec { rho: 0.0, tau: 0.01, h: 0.1, horizon: 1.0 },
    );
    s.load.terms = vec![
        LoadTerm { density: [0.15, 0.0], component: Some(0), ramp: Some([0.0, 0.5]) },
        LoadTerm { density: [-0.15, 0.0], component: Some(1), ramp: Some([0.0, 0.5]) },
    ];
    s
}

/// Two triangles meeting tip to tip with a gap of half the barrier
/// distance, clamped on their back edges.
pub fn corner_glide() -> ScenarioConfig {
    let tol = Tolerances::default();
    // diameter of the pair: x from -0.6 to 0.6 + gap, y from -1.04 to 1.04
    let gap = {
        let mut g = 0.0;
        for _ in 0..8 {
            let diam = ((1.2f64 + g).powi(2) + 2.08f64.powi(2)).sqrt();
            g = 0.5 * tol.d_hat_rel * diam;
        }
        g
    };
    let mut s = base(
        "corner-glide",
        "quasistatic",
        BodySpec {
            components: vec![
                vec![[0.0, 0.0], [-0.6, 1.04], [-0.6, -1.04]],
                vec![[gap, 0.0], [gap + 0.6, -1.04], [gap + 0.6, 1.04]],
            ],
            gamma: vec![[0, 1], [1, 1]],
            resolution: 0.3,
        },
        TimeSpec { rho: 0.0, tau: 0.05, h: 0.05, horizon: 0.5 },
    );
    s.load.terms = vec![
        LoadTerm { density: [0.05, 0.0], component: Some(0), ramp: Some([0.0, 0.5]) },
        LoadTerm { density: [-0.05, 0.0], component: Some(1), ramp: Some([0.0, 0.5]) },
    ];
    s
}

/// A block with a thin horizontal slot, clamped at the bottom; a downward
/// load bends the upper arm until it closes the slot on itself.
pub fn l_notch() -> ScenarioConfig {
    let mut s = base(
        "l-notch",
        "quasistatic",
        BodySpec {
            components: vec![vec![
                [0.0, 0.0],
                [2.0, 0.0],
                [2.0, 0.5],
                [0.5, 0.5],
                [0.5, 0.625],
                [2.0, 0.625],
                [2.0, 1.0],
                [0.0, 1.0],
            ]],
            gamma: vec![[0, 0]],
            resolution: 0.125,
        },
        TimeSpec { rho: 0.0, tau: 0.02, h: 0.02, horizon: 1.0 },
    );
    s.load.terms = vec![LoadTerm { density: [0.0, -0.05], component: None, ramp: Some([0.0, 0.5]) }];
    s
}

/// A unit square resting on the floor inside the barrier zone under a unit
/// downward load, with rigid modes pinned; used for force balance.
pub fn resting_square() -> ScenarioConfig {
    let tol = Tolerances::default();
    let g = 0.5 * tol.d_hat_rel * 2f64.sqrt();
    let mut s = base(
        "resting-square",
        "quasistatic",
        BodySpec { components: vec![square(0.0, g)], gamma: vec![], resolution: 0.25 },
        TimeSpec { rho: 0.0, tau: 0.1, h: 0.1, horizon: 0.2 },
    );
    s.pin_rigid_modes = true;
    s.container = floor();
    s.load.terms = vec![LoadTerm { density: [0.0, -1.0], component: None, ramp: None }];
    s
}

pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    match name {
        "bounce" => Some(bounce()),
        "squeeze" => Some(squeeze()),
        "corner-glide" => Some(corner_glide()),
        "l-notch" => Some(l_notch()),
        "resting-square" => Some(resting_square()),
        _ => None,
    }
}

pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    BUILTIN_NAMES.iter().filter_map(|n| builtin(n)).collect()
}
