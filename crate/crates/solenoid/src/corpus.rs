//! The bundled example rules, as solenoid DSL text.

use crate::presolenoid::{parse_solenoid_file, WrappingRule};

/// `(name, DSL source)` for every bundled example, in a fixed order.
pub const BUNDLED: &[(&str, &str)] = &[
    ("w1", include_str!("../corpus/w1.sol")),
    ("w2", include_str!("../corpus/w2.sol")),
    ("w3", include_str!("../corpus/w3.sol")),
    ("w4", include_str!("../corpus/w4.sol")),
    ("dyadic", include_str!("../corpus/dyadic.sol")),
    ("disjoint", include_str!("../corpus/disjoint.sol")),
];

pub fn source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Parses a bundled example; panics only if a bundled file is malformed.
pub fn rule(name: &str) -> Option<WrappingRule> {
    source(name).map(|s| parse_solenoid_file(s).unwrap_or_else(|e| panic!("bundled {name}.sol: {e}")))
}
