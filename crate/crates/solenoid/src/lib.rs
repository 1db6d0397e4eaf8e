//! Exact invariants of one-dimensional solenoids presented by wrapping rules:
//! axioms and orientation, building-block dimension data, K-theory, a finite-depth
//! model of the infinite dihedral Cantor dynamics, and a piecewise-linear metric model.

pub mod building_blocks;
pub mod corpus;
pub mod dihedral;
pub mod ktheory;
pub mod perron;
pub mod pl_model;
pub mod presolenoid;
