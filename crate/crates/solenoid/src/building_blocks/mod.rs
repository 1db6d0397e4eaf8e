//! Passages, stabilization, the boundary matrices I, U, X, N, the interval
//! substitution system and building-block records.

mod blocks;
mod interval;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::Serialize;

use crate::ktheory::matrix::IntegerMatrix;
use crate::presolenoid::{
    edge_cover_matrix, germ_map, junction_turns, power_with_budget, validate_axioms, AxiomOptions, Germ, GermMap, RuleError, Turn,
    WrappingRule, DEFAULT_LETTER_BUDGET,
};

pub use blocks::{char_variation, projection_witness, BlockError, BuildingBlock, GraphArrow, ProjectionError, ProjectionWitness, SideVertex};
pub use interval::{building_block_at, interval_system, IntervalError, IntervalLevel, IntervalSystem, N5Normalization};

/// Default cap on the stabilization exponent.
pub const DEFAULT_POWER_BOUND: u32 = 1024;

#[derive(Clone, Copy, Debug)]
pub struct StabilizeOptions {
    pub power_bound: u32,
    pub letter_budget: u128,
    pub axioms: AxiomOptions,
}

impl Default for StabilizeOptions {
    fn default() -> Self {
        StabilizeOptions { power_bound: DEFAULT_POWER_BOUND, letter_budget: DEFAULT_LETTER_BUDGET, axioms: AxiomOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StabilizeError {
    #[error("axioms fail: {}", .0.join(", "))]
    AxiomFailure(Vec<String>),
    #[error("no stabilizing power up to {0}")]
    NotStabilized(u32),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("internal inconsistency: {0}")]
    Consistency(String),
}

/// A passage: a non-degenerate turn of the stabilized rule.
pub type Passage = Turn;

/// Passages and boundary matrices of a stabilized rule.
#[derive(Clone, Debug)]
pub struct PassageSystem {
    /// The input rule.
    pub base: WrappingRule,
    pub stabilization_power: u32,
    /// `base^stabilization_power`.
    pub rule: WrappingRule,
    pub passages: Vec<Passage>,
    /// Edges × passages: 1 iff the passage contains the start germ of the edge.
    pub i: IntegerMatrix,
    /// Edges × passages: 1 iff the passage contains the terminal germ of the edge.
    pub u: IntegerMatrix,
    /// Passages × passages: `X[p'][p] = 1` iff `Dg(p) = p'`.
    pub x: IntegerMatrix,
    /// Passages × edges: number of occurrences of the passage in the edge word.
    pub n: IntegerMatrix,
    /// Edge-cover matrix of the stabilized rule.
    pub h: IntegerMatrix,
}

impl PassageSystem {
    pub fn passage_labels(&self) -> Vec<String> {
        self.passages.iter().map(|p| p.label(self.rule.graph())).collect()
    }

    pub fn passage_index(&self, t: Turn) -> Option<usize> {
        self.passages.iter().position(|&p| p == t)
    }

    pub fn edge_count(&self) -> usize {
        self.rule.edge_count()
    }

    pub fn passage_count(&self) -> usize {
        self.passages.len()
    }

    /// Serializable view.
    pub fn summary(&self) -> PassageSummary {
        PassageSummary {
            stabilization_power: self.stabilization_power,
            passages: self.passage_labels(),
            i: self.i.clone(),
            u: self.u.clone(),
            x: self.x.clone(),
            n: self.n.clone(),
            h: self.h.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PassageSummary {
    pub stabilization_power: u32,
    pub passages: Vec<String>,
    #[serde(rename = "I")]
    pub i: IntegerMatrix,
    #[serde(rename = "U")]
    pub u: IntegerMatrix,
    #[serde(rename = "X")]
    pub x: IntegerMatrix,
    #[serde(rename = "N")]
    pub n: IntegerMatrix,
    #[serde(rename = "H")]
    pub h: IntegerMatrix,
}

fn bool_mul(a: &[bool], b: &[bool], n: usize) -> Vec<bool> {
    let mut out = vec![false; n * n];
    for i in 0..n {
        for k in 0..n {
            if a[i * n + k] {
                for j in 0..n {
                    out[i * n + j] |= b[k * n + j];
                }
            }
        }
    }
    out
}

/// Per-edge turn sets of `h^m` for `m = 1, 2, …`, computed without expanding words:
/// `T_m(e) = ⋃_{x ∈ h(e)} T_{m-1}(x) ∪ Dh^{m-1}(junctions of h(e))`.
struct TurnSets<'a> {
    rule: &'a WrappingRule,
    dh: GermMap,
    dh_pow: GermMap,
    sets: Vec<BTreeSet<Turn>>,
}

impl<'a> TurnSets<'a> {
    fn new(rule: &'a WrappingRule) -> Self {
        let sets = rule.words().iter().map(|w| junction_turns(w).collect()).collect();
        let dh = germ_map(rule);
        TurnSets { rule, dh_pow: dh.clone(), dh, sets }
    }

    /// Advances from `m` to `m + 1`.
    fn step(&mut self) {
        let next = self
            .rule
            .words()
            .iter()
            .map(|w| {
                let mut s: BTreeSet<Turn> = BTreeSet::new();
                for l in w {
                    s.extend(self.sets[l.edge].iter().copied());
                }
                s.extend(junction_turns(w).map(|t| t.map(&self.dh_pow)));
                s
            })
            .collect();
        self.sets = next;
        self.dh_pow = self.dh.compose(&self.dh_pow);
    }
}

/// Finds the least power satisfying (mixing2), (stab1), (stab2) and computes I, U, X, N.
pub fn stabilize(rule: &WrappingRule, opts: &StabilizeOptions) -> Result<PassageSystem, StabilizeError> {
    let report = validate_axioms(rule, &opts.axioms);
    if !report.all_pass() {
        return Err(StabilizeError::AxiomFailure(report.failures().into_iter().map(String::from).collect()));
    }
    let m0 = stabilization_power(rule, opts.power_bound)?;
    passage_system(rule, m0, opts.letter_budget)
}

/// The least `m ≤ bound` at which `h^m` is stable; does not re-check the axioms.
pub fn stabilization_power(rule: &WrappingRule, bound: u32) -> Result<u32, StabilizeError> {
    let n = rule.edge_count();
    let h = edge_cover_matrix(rule);
    let hb: Vec<bool> = h.entries().iter().map(|x| x > &BigInt::from(0)).collect();
    let mut hm = hb.clone();
    let mut sets = TurnSets::new(rule);
    for m in 1..=bound {
        if m > 1 {
            hm = bool_mul(&hm, &hb, n);
            sets.step();
        }
        let mixing2 = hm.iter().all(|&x| x);
        if !mixing2 {
            continue;
        }
        let q: BTreeSet<Turn> = sets.sets.iter().flatten().copied().collect();
        // sets.dh_pow is Dh^m at this point.
        let stab1 = q.iter().all(|t| q.contains(&t.map(&sets.dh_pow)));
        let stab2 = sets.sets.iter().all(|s| s.len() == q.len());
        if stab1 && stab2 {
            return Ok(m);
        }
    }
    Err(StabilizeError::NotStabilized(bound))
}

/// Passage data of `h^m` read off the expanded words.
pub fn passage_system(rule: &WrappingRule, m: u32, budget: u128) -> Result<PassageSystem, StabilizeError> {
    let g = power_with_budget(rule, m, budget)?;
    let q: BTreeSet<Turn> = g.words().iter().flat_map(|w| junction_turns(w)).collect();
    let passages: Vec<Turn> = q.into_iter().collect();
    if let Some(t) = passages.iter().find(|t| t.is_degenerate()) {
        return Err(StabilizeError::Consistency(format!("degenerate passage {}", t.label(g.graph()))));
    }
    let ne = g.edge_count();
    let np = passages.len();
    let dg = germ_map(&g);
    let index = |t: Turn| passages.iter().position(|&p| p == t);
    let mut i = IntegerMatrix::zeros(ne, np);
    let mut u = IntegerMatrix::zeros(ne, np);
    let mut x = IntegerMatrix::zeros(np, np);
    let mut nm = IntegerMatrix::zeros(np, ne);
    for (k, p) in passages.iter().enumerate() {
        for e in 0..ne {
            if p.contains(Germ::start(e)) {
                i.set(e, k, 1.into());
            }
            if p.contains(Germ::terminal(e)) {
                u.set(e, k, 1.into());
            }
        }
        let image = p.map(&dg);
        let target = index(image).ok_or_else(|| {
            StabilizeError::Consistency(format!("Dg sends {} outside the passage set", p.label(g.graph())))
        })?;
        x.set(target, k, 1.into());
    }
    for (e, w) in g.words().iter().enumerate() {
        for t in junction_turns(w) {
            *nm.entry_mut(index(t).unwrap(), e) += 1;
        }
    }
    if !nm.is_positive() {
        return Err(StabilizeError::Consistency("some passage is missing from some edge word".into()));
    }
    let h = edge_cover_matrix(&g);
    Ok(PassageSystem { base: rule.clone(), stabilization_power: m, rule: g, passages, i, u, x, n: nm, h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presolenoid::parse_solenoid_file;

    fn wedge(rules: &[(&str, &str)]) -> WrappingRule {
        WrappingRule::wedge_from_words(rules).unwrap()
    }

    fn m(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::from_rows(rows)
    }

    #[test]
    fn w2_stabilizes_at_two() {
        let ps = stabilize(&wedge(&[("a", "b a"), ("b", "b a")]), &StabilizeOptions::default()).unwrap();
        assert_eq!(ps.stabilization_power, 2);
        assert_eq!(ps.passage_labels(), vec!["{a_start,b_term}", "{a_term,b_start}"]);
        assert_eq!(ps.i, m(&[vec![1, 0], vec![0, 1]]));
        assert_eq!(ps.u, m(&[vec![0, 1], vec![1, 0]]));
        assert_eq!(ps.x, m(&[vec![0, 0], vec![1, 1]]));
        assert_eq!(ps.n, m(&[vec![2, 2], vec![1, 1]]));
    }

    #[test]
    fn dyadic_is_already_stable() {
        let ps = stabilize(&wedge(&[("a", "a a")]), &StabilizeOptions::default()).unwrap();
        assert_eq!(ps.stabilization_power, 1);
        for mat in [&ps.i, &ps.u, &ps.x, &ps.n] {
            assert_eq!(mat, &m(&[vec![1]]));
        }
    }

    #[test]
    fn w4_stabilizes_at_two() {
        let ps = stabilize(&wedge(&[("a", "b a b^-1"), ("b", "a^-1 b a")]), &StabilizeOptions::default()).unwrap();
        assert_eq!(ps.stabilization_power, 2);
        // Canonical order sorts germs; compare against a hand computation that lists the passages as {a_t,b_s},{a_s,b_t},{a_t,b_t},{a_s,b_s}.
        let labels = ps.passage_labels();
        let order: Vec<usize> = ["{a_term,b_start}", "{a_start,b_term}", "{a_term,b_term}", "{a_start,b_start}"]
            .iter()
            .map(|l| labels.iter().position(|x| x == l).unwrap())
            .collect();
        let cols = |mat: &IntegerMatrix| mat.select(&(0..mat.rows()).collect::<Vec<_>>(), &order);
        assert_eq!(cols(&ps.i), m(&[vec![0, 1, 0, 1], vec![1, 0, 0, 1]]));
        assert_eq!(cols(&ps.u), m(&[vec![1, 0, 1, 0], vec![0, 1, 1, 0]]));
        assert_eq!(ps.n.select(&order, &[0, 1]), m(&[vec![2, 2], vec![3, 3], vec![1, 2], vec![2, 1]]));
        let x = ps.x.select(&order, &order);
        assert_eq!(x, m(&[vec![1, 1, 1, 1], vec![0; 4], vec![0; 4], vec![0; 4]]));
    }

    #[test]
    fn axiom_failure_is_propagated() {
        let text = "vertices: u w\nedge a: u -> u\nedge b: w -> w\nrule a = b b\nrule b = a a";
        let err = stabilize(&parse_solenoid_file(text).unwrap(), &StabilizeOptions::default()).unwrap_err();
        assert_eq!(err, StabilizeError::AxiomFailure(vec!["mixing".into()]));
    }
}
