//! Discrete contact forces and their structural checks.

use super::{contact_nodes, node_normal_cone, ContactEvent, ContactKind, Partner};
use crate::body::{Deformation, ReferenceBody};
use crate::geom::V2;

/// Force concentrated at one boundary node.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceAtom {
    pub node: usize,
    /// Reaction acting on the body at the node.
    pub force: V2,
    /// Boundary weight of the node (force / weight is a line density).
    pub weight: f64,
    /// Gap of the closest event at the node, infinite if none.
    pub gap: f64,
    pub kind: ContactKind,
    /// Share of `force` coming from container walls.
    pub obstacle_part: V2,
}

impl ForceAtom {
    pub fn self_part(&self) -> V2 {
        self.force - self.obstacle_part
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContactForce {
    pub atoms: Vec<ForceAtom>,
    pub step: usize,
}

impl ContactForce {
    pub fn total(&self) -> V2 {
        self.atoms.iter().map(|a| a.force).sum()
    }

    /// Total variation Σ |σ_x|.
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.force.norm()).sum()
    }
}

/// Groups of nodes that press on each other; within a group the self
/// contact forces must cancel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Pairing {
    pub clusters: Vec<Vec<usize>>,
}

impl Pairing {
    /// Connected components of the graph linking every self contact node
    /// with its partner node(s).
    pub fn from_events(body: &ReferenceBody, events: &[ContactEvent]) -> Self {
        let n = body.n_nodes();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut used = vec![false; n];
        let link = |p: &mut Vec<usize>, a: usize, b: usize| {
            let (ra, rb) = (find(p, a), find(p, b));
            p[ra] = rb;
        };
        for e in events.iter().filter(|e| e.kind == ContactKind::SelfContact) {
            used[e.x_node] = true;
            match e.partner {
                Partner::Node(y) => {
                    used[y] = true;
                    link(&mut parent, e.x_node, y);
                }
                Partner::Edge { segment, .. } => {
                    let s = body.segments[segment];
                    used[s.a] = true;
                    used[s.b] = true;
                    link(&mut parent, e.x_node, s.a);
                    link(&mut parent, e.x_node, s.b);
                }
                Partner::Wall(_) => {}
            }
        }
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in (0..n).filter(|&v| used[v]) {
            let r = find(&mut parent, v);
            by_root.entry(r).or_default().push(v);
        }
        Pairing { clusters: by_root.into_values().collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForceReport {
    /// Largest force found away from every contact event.
    pub off_support: f64,
    pub support_ok: bool,
    /// Largest angle by which −σ leaves the deformed normal cone.
    pub worst_direction: f64,
    pub worst_direction_node: Option<usize>,
    pub direction_ok: bool,
    /// Largest |Σ self forces| / Σ |self forces| over clusters.
    pub worst_action_reaction: f64,
    pub action_reaction_ok: bool,
}

impl ForceReport {
    pub fn ok(&self) -> bool {
        self.support_ok && self.direction_ok && self.action_reaction_ok
    }
}

pub fn validate_contact_force(
    sigma: &ContactForce,
    body: &ReferenceBody,
    def: &Deformation,
    events: &[ContactEvent],
    pairing: &Pairing,
    direction_tol: f64,
    tol_ar: f64,
) -> ForceReport {
    let on = contact_nodes(body, events);
    let mut off_support: f64 = 0.0;
    let mut worst_direction: f64 = 0.0;
    let mut worst_direction_node = None;
    let mut by_node = vec![V2::zeros(); body.n_nodes()];
    for a in &sigma.atoms {
        let f = a.force.norm();
        if f == 0.0 {
            continue;
        }
        by_node[a.node] += a.self_part();
        if !on[a.node] {
            off_support = off_support.max(f);
            continue;
        }
        let out = node_normal_cone(body, def, a.node).angular_margin(&(-a.force));
        if -out > worst_direction {
            worst_direction = -out;
            worst_direction_node = Some(a.node);
        }
    }
    let mut worst_ar: f64 = 0.0;
    for c in &pairing.clusters {
        let net: V2 = c.iter().map(|&v| by_node[v]).sum();
        let mass: f64 = c.iter().map(|&v| by_node[v].norm()).sum();
        if mass > 0.0 {
            worst_ar = worst_ar.max(net.norm() / mass);
        }
    }
    ForceReport {
        off_support,
        support_ok: off_support == 0.0,
        worst_direction,
        worst_direction_node,
        direction_ok: worst_direction <= direction_tol,
        worst_action_reaction: worst_ar,
        action_reaction_ok: worst_ar <= tol_ar,
    }
}
