//! Quasistatic and inertial contact of viscoelastic solids with corners.

pub mod body;
pub mod cones;
pub mod contact;
pub mod geom;
pub mod material;
pub mod solver;
pub mod harness;
