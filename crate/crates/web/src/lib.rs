//! Browser demo: corner cones under a shear, glide admissibility at a
//! tip-to-tip contact, and a bouncing square.

use corner_contact::cones::{
    polar_cone, push_forward_normal, push_forward_tangent, regular_tangent_cone_polys, PolyCone,
};
use corner_contact::contact::{admissible_direction_check, contact_set, Partner};
use corner_contact::geom::{unit_at, M2, V2};
use corner_contact::harness::builtin;
use corner_contact::solver::{time_delayed_solve, Model};
use wasm_bindgen::prelude::*;

fn flatten(c: &PolyCone) -> Vec<f64> {
    c.arcs().iter().flat_map(|a| [a.start, a.width]).collect()
}

/// Cones at one vertex of a polygon, before and after a constant gradient.
#[wasm_bindgen]
pub struct CornerCones {
    t_reg: PolyCone,
    normal: PolyCone,
    pushed_t: PolyCone,
    pushed_n: PolyCone,
}

#[wasm_bindgen]
impl CornerCones {
    /// `polygon` is x0, y0, x1, y1, ... counter-clockwise; `f` is row major.
    #[wasm_bindgen(constructor)]
    pub fn new(polygon: &[f64], vertex: usize, f: &[f64]) -> Result<CornerCones, JsError> {
        if polygon.len() < 6 || polygon.len() % 2 != 0 || f.len() != 4 {
            return Err(JsError::new("need at least three vertices and a 2x2 gradient"));
        }
        let poly: Vec<V2> = polygon.chunks(2).map(|p| V2::new(p[0], p[1])).collect();
        let x = *poly.get(vertex).ok_or_else(|| JsError::new("vertex out of range"))?;
        let t_reg = regular_tangent_cone_polys(&[poly], &x).map_err(|e| JsError::new(&e.to_string()))?;
        let normal = polar_cone(&t_reg);
        let f = M2::new(f[0], f[1], f[2], f[3]);
        let pushed_t = push_forward_tangent(&t_reg, &f).map_err(|e| JsError::new(&e.to_string()))?;
        let pushed_n = push_forward_normal(&normal, &f).map_err(|e| JsError::new(&e.to_string()))?;
        Ok(CornerCones { t_reg, normal, pushed_t, pushed_n })
    }

    /// Arcs as start, width pairs in radians.
    pub fn tangent(&self) -> Vec<f64> {
        flatten(&self.t_reg)
    }

    pub fn normal(&self) -> Vec<f64> {
        flatten(&self.normal)
    }

    pub fn pushed_tangent(&self) -> Vec<f64> {
        flatten(&self.pushed_t)
    }

    pub fn pushed_normal(&self) -> Vec<f64> {
        flatten(&self.pushed_n)
    }

    /// Whether cof F carries the normal cone onto the polar of F T.
    pub fn polars_agree(&self) -> bool {
        polar_cone(&self.pushed_t).approx_eq(&self.pushed_n, 1e-9)
    }
}

/// Moves the right triangle of the corner-glide scenario rigidly in the
/// direction at `angle_deg` (0 = straight apart) and reports whether the
/// relative motion is strictly admissible, with its angular margin in degrees.
#[wasm_bindgen]
pub fn glide_check(angle_deg: f64) -> Result<Vec<f64>, JsError> {
    let cfg = builtin("corner-glide").expect("builtin");
    let (model, def) = Model::from_config(&cfg, false).map_err(|e| JsError::new(&e.to_string()))?;
    let body = &model.body;
    let events = contact_set(body, &def, &model.container, &model.geometry, model.tol.tol_contact);
    let d = unit_at(angle_deg.to_radians());
    let phi: Vec<V2> = (0..body.n_nodes())
        .map(|v| if body.node_component[v] == 1 && !body.gamma_node[v] { d } else { V2::zeros() })
        .collect();
    let ok = admissible_direction_check(body, &def, &phi, &events, 1e-8).is_admissible();
    let margin = events
        .iter()
        .map(|e| {
            let y = match e.partner {
                Partner::Node(y) => phi[y],
                _ => V2::zeros(),
            };
            let rel = phi[e.x_node] - y;
            e.x_cone.sum(&e.partner_cone.negate()).angular_margin(&rel)
        })
        .fold(f64::INFINITY, f64::min);
    Ok(vec![if ok { 1.0 } else { 0.0 }, margin.to_degrees()])
}

/// The bounce scenario solved for a chosen drop speed; frames are replayed.
#[wasm_bindgen]
pub struct Bounce {
    triangles: Vec<u32>,
    frames: Vec<Vec<V2>>,
    contact: Vec<bool>,
    tau: f64,
}

#[wasm_bindgen]
impl Bounce {
    #[wasm_bindgen(constructor)]
    pub fn new(speed: f64) -> Result<Bounce, JsError> {
        let mut cfg = builtin("bounce").expect("builtin");
        cfg.initial.velocities = vec![[0.0, -speed]];
        let out = time_delayed_solve(&cfg).map_err(|e| JsError::new(&e.to_string()))?;
        let triangles = out.model.body.triangles.iter().flat_map(|t| t.map(|i| i as u32)).collect();
        let mut contact = vec![false];
        contact.extend(out.diagnostics.iter().map(|d| d.n_events > 0));
        Ok(Bounce { triangles, frames: out.frames, contact, tau: out.model.tau })
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn time_step(&self) -> f64 {
        self.tau
    }

    pub fn triangles(&self) -> Vec<u32> {
        self.triangles.clone()
    }

    /// Node positions of frame `k` as x0, y0, x1, y1, ...
    pub fn positions(&self, k: usize) -> Vec<f64> {
        self.frames[k.min(self.frames.len() - 1)].iter().flat_map(|p| [p.x, p.y]).collect()
    }

    pub fn in_contact(&self, k: usize) -> bool {
        self.contact[k.min(self.contact.len() - 1)]
    }
}
