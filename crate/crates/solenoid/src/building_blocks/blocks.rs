//! Building-block records, the projection graph and the variation bound.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::PassageSystem;
use crate::ktheory::matrix::{serialize_bigint_vec, IntegerMatrix};
use crate::perron::{perron, rat_pow, rat_string, DEFAULT_PRECISION_BITS};
use crate::presolenoid::edge_cover_matrix;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BlockError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("entry {0} is not positive")]
    NonPositive(String),
    #[error("I and U must be 0/1 matrices")]
    NotBinary,
    #[error("column {column}: I and U entries sum to {sum}, expected 2")]
    ColumnSum { column: usize, sum: BigInt },
    #[error("row {row}: Σ {which}_ik a(k) = {lhs} exceeds b = {rhs}")]
    Standalg { row: usize, which: &'static str, lhs: BigInt, rhs: BigInt },
}

/// The algebra `A(a, b, I, U)`, recorded by its matrix data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuildingBlock {
    #[serde(serialize_with = "serialize_bigint_vec")]
    pub a: Vec<BigInt>,
    #[serde(serialize_with = "serialize_bigint_vec")]
    pub b: Vec<BigInt>,
    #[serde(rename = "I")]
    pub i: IntegerMatrix,
    #[serde(rename = "U")]
    pub u: IntegerMatrix,
    pub unital: bool,
    /// Known only when the block comes from a passage system (needs `N`).
    pub full: Option<bool>,
}

impl BuildingBlock {
    pub fn new(a: Vec<BigInt>, b: Vec<BigInt>, i: IntegerMatrix, u: IntegerMatrix) -> Result<Self, BlockError> {
        let (n, m) = (b.len(), a.len());
        if i.rows() != n || u.rows() != n || i.cols() != m || u.cols() != m {
            return Err(BlockError::Dimension(format!(
                "a has {m} entries, b has {n}, I is {}×{}, U is {}×{}",
                i.rows(),
                i.cols(),
                u.rows(),
                u.cols()
            )));
        }
        for (name, v) in [("a", &a), ("b", &b)] {
            if let Some(k) = v.iter().position(|x| x <= &BigInt::zero()) {
                return Err(BlockError::NonPositive(format!("{name}[{k}]")));
            }
        }
        let binary = |x: &BigInt| x.is_zero() || x.is_one();
        if !i.entries().iter().all(binary) || !u.entries().iter().all(binary) {
            return Err(BlockError::NotBinary);
        }
        for k in 0..m {
            let sum: BigInt = i.column(k).iter().chain(u.column(k).iter()).sum();
            if sum != BigInt::from(2) {
                return Err(BlockError::ColumnSum { column: k, sum });
            }
        }
        let ia = i.mul_vec(&a);
        let ua = u.mul_vec(&a);
        for row in 0..n {
            for (which, lhs) in [("I", &ia[row]), ("U", &ua[row])] {
                if lhs > &b[row] {
                    return Err(BlockError::Standalg { row, which, lhs: lhs.clone(), rhs: b[row].clone() });
                }
            }
        }
        let unital = (0..n).all(|r| ia[r] == b[r] && ua[r] == b[r]);
        Ok(BuildingBlock { a, b, i, u, unital, full: None })
    }

    /// Number of edge summands `n`.
    pub fn edge_count(&self) -> usize {
        self.b.len()
    }

    pub fn passage_count(&self) -> usize {
        self.a.len()
    }
}

/// A vertex `(i, →)` or `(i, ←)` of the projection graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SideVertex {
    pub edge: usize,
    /// `true` for `→` (travelling towards the terminal end).
    pub forward: bool,
}

impl SideVertex {
    fn index(self) -> usize {
        2 * self.edge + usize::from(!self.forward)
    }

    #[cfg(test)]
    fn from_index(k: usize) -> Self {
        SideVertex { edge: k / 2, forward: k.is_multiple_of(2) }
    }

    pub fn label(self) -> String {
        format!("({},{})", self.edge, if self.forward { "→" } else { "←" })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphArrow {
    pub from: SideVertex,
    pub to: SideVertex,
    /// Passage through which the arrow passes.
    pub passage: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ProjectionError {
    #[error("row {row} of {which} has no nonzero entry")]
    EmptyRow { row: usize, which: &'static str },
    #[error("min a(k) = {min} is below 2n+1 = {needed}")]
    SmallMultiplicity { min: BigInt, needed: usize },
    #[error("the projection graph has no loop")]
    NoLoop,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionWitness {
    pub arrows: Vec<GraphArrow>,
    /// Arrows of a shortest closed path, in order.
    pub cycle: Vec<GraphArrow>,
    /// One line per rank-one slot of the projection.
    pub realization: Vec<String>,
    #[serde(serialize_with = "serialize_rational")]
    pub trace_bound: BigRational,
}

fn serialize_rational<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(x))
}

/// Arrows of the projection graph: moving along edge `i` in the given direction, leaving it
/// through the passage `j` at the end reached, and continuing into the partner edge of `j`.
pub fn projection_arrows(i_mat: &IntegerMatrix, u_mat: &IntegerMatrix) -> Vec<GraphArrow> {
    let n = i_mat.rows();
    let m = i_mat.cols();
    let one = |mat: &IntegerMatrix, r: usize, c: usize| mat.get(r, c).is_one();
    let mut out = Vec::new();
    for i in 0..n {
        for ip in 0..n {
            for j in 0..m {
                let fwd = |edge| SideVertex { edge, forward: true };
                let back = |edge| SideVertex { edge, forward: false };
                if one(u_mat, i, j) && one(i_mat, ip, j) {
                    out.push(GraphArrow { from: fwd(i), to: fwd(ip), passage: j });
                }
                if i != ip && one(u_mat, i, j) && one(u_mat, ip, j) {
                    out.push(GraphArrow { from: fwd(i), to: back(ip), passage: j });
                }
                if one(i_mat, i, j) && one(u_mat, ip, j) {
                    out.push(GraphArrow { from: back(i), to: back(ip), passage: j });
                }
                if i != ip && one(i_mat, i, j) && one(i_mat, ip, j) {
                    out.push(GraphArrow { from: back(i), to: fwd(ip), passage: j });
                }
            }
        }
    }
    out.sort_by_key(|a| (a.from, a.to, a.passage));
    out
}

/// Shortest closed path, by a breadth-first search from every vertex.
fn shortest_cycle(arrows: &[GraphArrow], vertex_count: usize) -> Option<Vec<GraphArrow>> {
    let mut out_arrows: Vec<Vec<usize>> = vec![Vec::new(); vertex_count];
    for (k, a) in arrows.iter().enumerate() {
        out_arrows[a.from.index()].push(k);
    }
    let mut best: Option<Vec<GraphArrow>> = None;
    for start in 0..vertex_count {
        let mut via: Vec<Option<usize>> = vec![None; vertex_count];
        let mut seen = vec![false; vertex_count];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut closing: Option<usize> = None;
        'bfs: while let Some(v) = queue.pop_front() {
            for &k in &out_arrows[v] {
                let w = arrows[k].to.index();
                if w == start {
                    closing = Some(k);
                    break 'bfs;
                }
                if !seen[w] {
                    seen[w] = true;
                    via[w] = Some(k);
                    queue.push_back(w);
                }
            }
        }
        let Some(last) = closing else { continue };
        let mut path = vec![arrows[last]];
        let mut v = arrows[last].from.index();
        while v != start {
            let k = via[v].expect("breadth-first tree");
            path.push(arrows[k]);
            v = arrows[k].from.index();
        }
        path.reverse();
        if best.as_ref().is_none_or(|b| path.len() < b.len()) {
            best = Some(path);
        }
    }
    best
}

/// A loop in the projection graph together with the trace bound `(2n+1)/min a(k)`.
pub fn projection_witness(block: &BuildingBlock) -> Result<ProjectionWitness, ProjectionError> {
    let n = block.edge_count();
    for row in 0..n {
        for (which, mat) in [("U", &block.u), ("I", &block.i)] {
            if mat.row(row).iter().all(Zero::is_zero) {
                return Err(ProjectionError::EmptyRow { row, which });
            }
        }
    }
    let min = block.a.iter().min().cloned().unwrap_or_default();
    let needed = 2 * n + 1;
    if min < BigInt::from(needed) {
        return Err(ProjectionError::SmallMultiplicity { min, needed });
    }
    let arrows = projection_arrows(&block.i, &block.u);
    let cycle = shortest_cycle(&arrows, 2 * n).ok_or(ProjectionError::NoLoop)?;
    let mut realization = Vec::new();
    for (slot, arrow) in cycle.iter().enumerate() {
        realization.push(format!(
            "slot {slot}: edge {} run {}, then a rank-one matrix unit at passage {} joining it to edge {} run {}",
            arrow.from.edge,
            if arrow.from.forward { "forward" } else { "backward" },
            arrow.passage,
            arrow.to.edge,
            if arrow.to.forward { "forward" } else { "backward" }
        ));
    }
    realization.push(format!("the {} slots close up into one projection of rank at most {needed}", cycle.len()));
    let trace_bound = BigRational::new(BigInt::from(needed), min);
    Ok(ProjectionWitness { arrows, cycle, realization, trace_bound })
}

/// Upper bound `(max edge length)·λ^{-k}` on the diameter of a k-fold inverse-branch image.
/// Lengths are normalized to max 1; for irrational λ the lower end of its enclosure is used.
pub fn char_variation(ps: &PassageSystem, k: u32) -> BigRational {
    let h = edge_cover_matrix(&ps.base);
    let p = perron(&h, DEFAULT_PRECISION_BITS).expect("stabilized rules have primitive cover matrices");
    let lambda = p.lambda.enclosure.lo.clone();
    BigRational::one() / rat_pow(&lambda, k)
}

#[cfg(test)]
mod tests {
    use super::super::{stabilize, StabilizeOptions};
    use super::*;
    use crate::presolenoid::WrappingRule;

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| x.into()).collect()
    }

    fn id2() -> IntegerMatrix {
        IntegerMatrix::from_rows(&[vec![1, 0], vec![0, 1]])
    }

    fn swap2() -> IntegerMatrix {
        IntegerMatrix::from_rows(&[vec![0, 1], vec![1, 0]])
    }

    #[test]
    fn unital_flag() {
        assert!(BuildingBlock::new(v(&[2, 2]), v(&[2, 2]), id2(), swap2()).unwrap().unital);
        assert!(!BuildingBlock::new(v(&[1, 1]), v(&[3, 3]), id2(), swap2()).unwrap().unital);
    }

    #[test]
    fn constructor_rejects_bad_columns_and_overflow() {
        let e = BuildingBlock::new(v(&[2, 2]), v(&[2, 2]), id2(), IntegerMatrix::zeros(2, 2)).unwrap_err();
        assert!(matches!(e, BlockError::ColumnSum { column: 0, .. }));
        let e = BuildingBlock::new(v(&[3, 3]), v(&[2, 2]), id2(), swap2()).unwrap_err();
        assert!(matches!(e, BlockError::Standalg { row: 0, .. }));
        let e = BuildingBlock::new(v(&[0, 3]), v(&[2, 2]), id2(), swap2()).unwrap_err();
        assert!(matches!(e, BlockError::NonPositive(_)));
    }

    #[test]
    fn projection_loop_two_edges() {
        let b = BuildingBlock::new(v(&[5, 5]), v(&[10, 10]), id2(), swap2()).unwrap();
        let w = projection_witness(&b).unwrap();
        assert!(!w.cycle.is_empty() && w.cycle.len() <= 4);
        assert_eq!(w.trace_bound, BigRational::one());
        for pair in w.cycle.windows(2) {
            assert_eq!(pair[0].to, pair[1].from);
        }
        assert_eq!(w.cycle.last().unwrap().to, w.cycle[0].from);
    }

    #[test]
    fn projection_loop_single_edge() {
        let one = IntegerMatrix::from_rows(&[vec![1]]);
        let b = BuildingBlock::new(v(&[3]), v(&[3]), one.clone(), one).unwrap();
        let w = projection_witness(&b).unwrap();
        assert!(w.cycle.len() <= 2);
        assert_eq!(w.trace_bound, BigRational::one());
    }

    #[test]
    fn projection_precondition() {
        let b = BuildingBlock::new(v(&[1, 1]), v(&[10, 10]), id2(), swap2()).unwrap();
        assert_eq!(
            projection_witness(&b).unwrap_err(),
            ProjectionError::SmallMultiplicity { min: 1.into(), needed: 5 }
        );
    }

    #[test]
    fn projection_graph_has_no_sinks() {
        let b = BuildingBlock::new(v(&[5, 5]), v(&[10, 10]), id2(), swap2()).unwrap();
        let arrows = projection_arrows(&b.i, &b.u);
        for k in 0..4 {
            let s = SideVertex::from_index(k);
            assert!(arrows.iter().any(|a| a.from == s));
            assert!(arrows.iter().any(|a| a.to == s));
        }
    }

    #[test]
    fn variation_examples() {
        let opts = StabilizeOptions::default();
        let w2 = stabilize(&WrappingRule::wedge_from_words(&[("a", "b a"), ("b", "b a")]).unwrap(), &opts).unwrap();
        assert_eq!(char_variation(&w2, 0), BigRational::one());
        assert_eq!(char_variation(&w2, 3), BigRational::new(1.into(), 8.into()));
        let w4 = stabilize(&WrappingRule::wedge_from_words(&[("a", "b a b^-1"), ("b", "a^-1 b a")]).unwrap(), &opts).unwrap();
        assert_eq!(char_variation(&w4, 2), BigRational::new(1.into(), 9.into()));
    }
}
