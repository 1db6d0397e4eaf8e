//! The stationary ordered Bratteli diagram of a wedge rule, the space of signed nested
//! interval sequences with its infinite dihedral action, and finite-depth checks of
//! freeness, minimality, invariant measure, castles and Rokhlin pairs.
//!
//! A depth-`D` cylinder is written `(s, c, p)`: `c` is the edge at level `D`, `p` a letter
//! position in `g^D(e_c)` and `s` the sign. The direction of travel along `e_c` is
//! `d = s·ε_p`, where `ε_p` is the exponent of the letter at `p`; `φ` moves one letter in
//! direction `d` and `S` flips the sign.

mod action;
mod castle;
mod checks;
mod diagram;
mod domain;
mod measure;

use serde::Serializer;

pub use action::{Chain, SigmaPoint};
pub use castle::{castle, rokhlin_pair, Castle, RokhlinPair, Tower, TowerFunction};
pub use checks::{
    conjugacy_check, freeness_check, lambda_check, minimality_check, ConjugacyReport, FreenessReport, LambdaReport,
    MinimalityReport, MinimalityVerdict,
};
pub use diagram::{build_diagram, ArrowLabel, DiagramNormalization, OrderedBratteli};
pub use domain::{fundamental_domain, FundamentalDomain, Involution};
pub use measure::{check_measure, invariant_measure, CylinderMeasure, MeasureReport};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DihedralError {
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("germ normalization failed: {0}")]
    Normalization(String),
    #[error("undetermined at depth {depth}")]
    Undetermined { depth: usize },
    #[error("max-path at depth {depth}")]
    MaxPath { depth: usize },
    #[error("word lengths overflow at depth {depth}")]
    Overflow { depth: usize },
    #[error("refinement needed at depth {depth}: {reason}")]
    Refinement { depth: usize, reason: String },
    #[error("insufficient depth: {0}")]
    Depth(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("internal inconsistency: {0}")]
    Consistency(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
}

/// Large counts go to JSON as decimal strings.
pub(crate) fn serialize_u128<S: Serializer>(x: &u128, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}
