//! Piecewise-linear metric realization of a wrapping rule.
//!
//! Each edge gets the length given by the left Perron vector of its cover matrix, and
//! `h` is affine on each branch. Points carry exact rational positions, so the
//! expansion and contraction identities below hold exactly rather than to a tolerance.

mod decay;
mod point;

pub use decay::{decay_checks, DecayReport, LevelDecay, PairDecay};
pub use point::{metric_d, MetricValue, SolenoidPoint};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::perron::{perron, rat_string, RealInterval};
use crate::presolenoid::{edge_cover_matrix, Letter, WrappingRule};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PLError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("invalid branch: {0}")]
    InvalidBranch(String),
    #[error("the point sits on a branch boundary; candidates {candidates:?}")]
    BoundaryAmbiguity { candidates: Vec<PLPoint> },
    #[error("points of different truncation depth ({0} vs {1})")]
    DepthMismatch(usize, usize),
    #[error("internal inconsistency: {0}")]
    Consistency(String),
}

/// A point of the graph: an edge and a position `0 ≤ t ≤ ℓ(edge)` measured from its source.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct PLPoint {
    pub edge: usize,
    #[serde(serialize_with = "serialize_rat")]
    pub t: BigRational,
}

/// Where a point actually is; edge endpoints collapse to vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Place {
    Vertex(usize),
    Interior(usize, BigRational),
}

/// The `index`-th letter of the word of `edge`, i.e. one affine piece of `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Branch {
    pub edge: usize,
    pub index: usize,
}

/// Affine piece of `h` on `edge`: `[start, end]` (source-edge coordinates) maps onto `letter`.
#[derive(Clone, Debug, Serialize)]
pub struct BranchPiece {
    pub letter: Letter,
    #[serde(serialize_with = "serialize_rat")]
    pub start: BigRational,
    #[serde(serialize_with = "serialize_rat")]
    pub end: BigRational,
    /// Start of the letter inside the image word, in image length.
    #[serde(skip)]
    image_start: BigRational,
}

pub(crate) fn serialize_rat<S: serde::Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rat_string(x))
}

fn serialize_rats<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rat_string))
}

fn serialize_interval<S: serde::Serializer>(x: &RealInterval, s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq([rat_string(&x.lo), rat_string(&x.hi)])
}

#[derive(Clone, Debug, Serialize)]
pub struct PLRealization {
    #[serde(skip)]
    rule: WrappingRule,
    /// Positive left Perron vector of the cover matrix, largest entry 1.
    #[serde(serialize_with = "serialize_rats")]
    pub lengths: Vec<BigRational>,
    /// Enclosure of the Perron value; a single point when it is an integer.
    #[serde(serialize_with = "serialize_interval")]
    pub lambda: RealInterval,
    /// Slope of `h` on each edge: image length over edge length. Equal to `λ` when `λ` is
    /// exact, and inside the enclosure otherwise.
    #[serde(serialize_with = "serialize_rats")]
    pub slopes: Vec<BigRational>,
    pub branches: Vec<Vec<BranchPiece>>,
    /// An upper bound for the diameter of the graph.
    #[serde(serialize_with = "serialize_rat")]
    pub diameter_bound: BigRational,
    #[serde(skip)]
    vertex_distance: Vec<Vec<BigRational>>,
}

/// Builds the realization; `bits` controls the width of the Perron enclosure when `λ` is
/// irrational (`2^-bits`).
pub fn pl_realization(rule: &WrappingRule, bits: u32) -> Result<PLRealization, PLError> {
    let h = edge_cover_matrix(rule);
    let data = perron(&h, bits).map_err(|e| PLError::Precondition(e.to_string()))?;
    if data.lambda.enclosure.lo <= BigRational::one() {
        return Err(PLError::Precondition("the Perron value is not above 1, so h is not expanding".into()));
    }
    let lengths = data.left.clone();
    let n = rule.edge_count();
    let mut slopes = Vec::with_capacity(n);
    let mut branches = Vec::with_capacity(n);
    for j in 0..n {
        let total: BigRational = rule.word(j).iter().map(|l| &lengths[l.edge]).sum();
        let slope = &total / &lengths[j];
        let inside = match &data.lambda.exact {
            Some(k) => slope == BigRational::from_integer(k.clone()),
            None => data.lambda.enclosure.contains(&slope),
        };
        if !inside {
            return Err(PLError::Consistency(format!("slope {} on edge {j} is outside the Perron enclosure", rat_string(&slope))));
        }
        let mut pieces = Vec::new();
        let mut acc = BigRational::zero();
        for &l in rule.word(j) {
            let next = &acc + &lengths[l.edge];
            pieces.push(BranchPiece { letter: l, start: &acc / &slope, end: &next / &slope, image_start: acc });
            acc = next;
        }
        slopes.push(slope);
        branches.push(pieces);
    }
    let vertex_distance = vertex_distances(rule, &lengths);
    let max_len = lengths.iter().max().cloned().unwrap_or_else(BigRational::zero);
    let max_vd = vertex_distance.iter().flatten().max().cloned().unwrap_or_else(BigRational::zero);
    Ok(PLRealization {
        rule: rule.clone(),
        lengths,
        lambda: data.lambda.enclosure.clone(),
        slopes,
        branches,
        diameter_bound: max_vd + max_len,
        vertex_distance,
    })
}

/// Shortest-path distances between vertices, by Floyd–Warshall.
fn vertex_distances(rule: &WrappingRule, lengths: &[BigRational]) -> Vec<Vec<BigRational>> {
    let g = rule.graph();
    let v = g.vertices.len();
    let mut dist: Vec<Vec<Option<BigRational>>> = vec![vec![None; v]; v];
    for (a, row) in dist.iter_mut().enumerate() {
        row[a] = Some(BigRational::zero());
    }
    for (e, decl) in g.edges.iter().enumerate() {
        for (a, b) in [(decl.src, decl.dst), (decl.dst, decl.src)] {
            if dist[a][b].as_ref().is_none_or(|d| &lengths[e] < d) {
                dist[a][b] = Some(lengths[e].clone());
            }
        }
    }
    for k in 0..v {
        for a in 0..v {
            for b in 0..v {
                if let (Some(x), Some(y)) = (&dist[a][k], &dist[k][b]) {
                    let via = x + y;
                    if dist[a][b].as_ref().is_none_or(|d| &via < d) {
                        dist[a][b] = Some(via);
                    }
                }
            }
        }
    }
    dist.into_iter().map(|row| row.into_iter().map(|d| d.unwrap_or_else(BigRational::zero)).collect()).collect()
}

impl PLRealization {
    pub fn rule(&self) -> &WrappingRule {
        &self.rule
    }

    pub fn edge_count(&self) -> usize {
        self.lengths.len()
    }

    pub fn check(&self, x: &PLPoint) -> Result<(), PLError> {
        if x.edge >= self.edge_count() {
            return Err(PLError::InvalidPoint(format!("edge {} does not exist", x.edge)));
        }
        if x.t.is_negative() || x.t > self.lengths[x.edge] {
            return Err(PLError::InvalidPoint(format!("position {} is off edge {}", rat_string(&x.t), x.edge)));
        }
        Ok(())
    }

    pub fn place(&self, x: &PLPoint) -> Place {
        let decl = &self.rule.graph().edges[x.edge];
        if x.t.is_zero() {
            Place::Vertex(decl.src)
        } else if x.t == self.lengths[x.edge] {
            Place::Vertex(decl.dst)
        } else {
            Place::Interior(x.edge, x.t.clone())
        }
    }

    pub fn same_place(&self, x: &PLPoint, y: &PLPoint) -> bool {
        self.place(x) == self.place(y)
    }

    /// The point at the source vertex of `edge`.
    pub fn vertex_point(&self, edge: usize) -> PLPoint {
        PLPoint { edge, t: BigRational::zero() }
    }

    /// `h(x)`: scale by the slope of the edge, then read off the letter covering the result.
    pub fn eval_h(&self, x: &PLPoint) -> Result<PLPoint, PLError> {
        self.check(x)?;
        let s = &self.slopes[x.edge] * &x.t;
        let pieces = &self.branches[x.edge];
        let k = pieces
            .iter()
            .position(|p| s <= &p.image_start + &self.lengths[p.letter.edge])
            .unwrap_or(pieces.len() - 1);
        Ok(self.apply_piece(&pieces[k], &(s - &pieces[k].image_start)))
    }

    fn apply_piece(&self, piece: &BranchPiece, u: &BigRational) -> PLPoint {
        let y = piece.letter;
        let t = if y.sign > 0 { u.clone() } else { &self.lengths[y.edge] - u };
        PLPoint { edge: y.edge, t }
    }

    /// The branch of `h` whose piece contains `x` (the first one at a boundary).
    pub fn branch_of(&self, x: &PLPoint) -> Result<Branch, PLError> {
        self.check(x)?;
        let index = self.branches[x.edge].iter().position(|p| x.t <= p.end).unwrap_or(0);
        Ok(Branch { edge: x.edge, index })
    }

    /// Branches whose letter runs along the edge of `x`.
    pub fn branches_over(&self, x: &PLPoint) -> Vec<Branch> {
        let mut out = Vec::new();
        for (edge, pieces) in self.branches.iter().enumerate() {
            for (index, p) in pieces.iter().enumerate() {
                if p.letter.edge == x.edge {
                    out.push(Branch { edge, index });
                }
            }
        }
        out
    }

    /// The preimage of `x` under the affine piece `b`; contracts distances by the slope.
    ///
    /// A vertex point given on another edge is accepted when it is an endpoint of the
    /// letter; if both endpoints sit at that vertex the two candidates are reported.
    pub fn inverse_branch(&self, x: &PLPoint, b: Branch) -> Result<PLPoint, PLError> {
        self.check(x)?;
        let piece = self
            .branches
            .get(b.edge)
            .and_then(|p| p.get(b.index))
            .ok_or_else(|| PLError::InvalidBranch(format!("{b:?} does not exist")))?;
        let y = piece.letter;
        if x.edge == y.edge {
            let u = if y.sign > 0 { x.t.clone() } else { &self.lengths[y.edge] - &x.t };
            return Ok(PLPoint { edge: b.edge, t: (&piece.image_start + u) / &self.slopes[b.edge] });
        }
        let Place::Vertex(v) = self.place(x) else {
            return Err(PLError::InvalidBranch(format!("{b:?} covers edge {}, not edge {}", y.edge, x.edge)));
        };
        let decl = &self.rule.graph().edges[y.edge];
        let (first, last) = if y.sign > 0 { (decl.src, decl.dst) } else { (decl.dst, decl.src) };
        let mut candidates = Vec::new();
        if first == v {
            candidates.push(PLPoint { edge: b.edge, t: piece.start.clone() });
        }
        if last == v {
            candidates.push(PLPoint { edge: b.edge, t: piece.end.clone() });
        }
        match candidates.len() {
            0 => Err(PLError::InvalidBranch(format!("{b:?} does not reach vertex {v}"))),
            1 => Ok(candidates.pop().unwrap()),
            _ => Err(PLError::BoundaryAmbiguity { candidates }),
        }
    }

    /// Path distance in the metric graph.
    pub fn distance(&self, x: &PLPoint, y: &PLPoint) -> BigRational {
        let edges = &self.rule.graph().edges;
        let ends = |p: &PLPoint| {
            let d = &edges[p.edge];
            [(d.src, p.t.clone()), (d.dst, &self.lengths[p.edge] - &p.t)]
        };
        let mut best = if x.edge == y.edge { Some((&x.t - &y.t).abs()) } else { None };
        for (a, da) in ends(x) {
            for (b, db) in ends(y) {
                let via = &da + &self.vertex_distance[a][b] + &db;
                if best.as_ref().is_none_or(|d| &via < d) {
                    best = Some(via);
                }
            }
        }
        best.unwrap()
    }

    /// A point with a dyadic position of denominator `2^32` on a uniformly chosen edge.
    pub fn random_point<R: Rng>(&self, rng: &mut R) -> PLPoint {
        let edge = rng.gen_range(0..self.edge_count());
        let frac = BigRational::new(BigInt::from(rng.gen_range(0u64..=1u64 << 32)), BigInt::one() << 32);
        PLPoint { edge, t: frac * &self.lengths[edge] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presolenoid::corpus;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn w2_midpoint_lands_in_the_second_letter() {
        let p = pl_realization(&corpus::w2(), 64).unwrap();
        assert_eq!(p.lengths, vec![rat(1, 1), rat(1, 1)]);
        assert_eq!(p.slopes, vec![rat(2, 1), rat(2, 1)]);
        // a ↦ b a: positions in [0, 1/2] run along b, [1/2, 1] along a.
        let y = p.eval_h(&PLPoint { edge: 0, t: rat(3, 4) }).unwrap();
        assert_eq!(y, PLPoint { edge: 0, t: rat(1, 2) });
        let y = p.eval_h(&PLPoint { edge: 0, t: rat(1, 4) }).unwrap();
        assert_eq!(y, PLPoint { edge: 1, t: rat(1, 2) });
    }

    #[test]
    fn the_vertex_is_fixed() {
        for rule in [corpus::w1(), corpus::w2(), corpus::w4(), corpus::dyadic()] {
            let p = pl_realization(&rule, 64).unwrap();
            for e in 0..p.edge_count() {
                let v = p.vertex_point(e);
                assert!(p.same_place(&p.eval_h(&v).unwrap(), &v));
            }
        }
    }

    #[test]
    fn inverse_branch_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for rule in [corpus::w1(), corpus::w3(), corpus::w4()] {
            let p = pl_realization(&rule, 64).unwrap();
            for _ in 0..1000 {
                let x = p.random_point(&mut rng);
                let bs = p.branches_over(&x);
                let b = bs[rng.gen_range(0..bs.len())];
                let pre = p.inverse_branch(&x, b).unwrap();
                assert!(p.same_place(&p.eval_h(&pre).unwrap(), &x));
            }
        }
    }

    #[test]
    fn inverse_branch_contracts_by_the_slope() {
        let p = pl_realization(&corpus::w4(), 64).unwrap();
        let x = PLPoint { edge: 1, t: rat(1, 5) };
        let y = PLPoint { edge: 1, t: rat(2, 7) };
        for b in p.branches_over(&x) {
            let (a, c) = (p.inverse_branch(&x, b).unwrap(), p.inverse_branch(&y, b).unwrap());
            assert_eq!(p.distance(&a, &c) * &p.slopes[b.edge], p.distance(&x, &y));
        }
    }

    #[test]
    fn vertex_preimages_on_loops_are_ambiguous() {
        let p = pl_realization(&corpus::w2(), 64).unwrap();
        // The vertex given as the end of edge b, pulled back through the letter `a` of a ↦ b a.
        let v = PLPoint { edge: 1, t: rat(1, 1) };
        match p.inverse_branch(&v, Branch { edge: 0, index: 1 }) {
            Err(PLError::BoundaryAmbiguity { candidates }) => {
                assert_eq!(candidates, vec![PLPoint { edge: 0, t: rat(1, 2) }, PLPoint { edge: 0, t: rat(1, 1) }])
            }
            other => panic!("expected an ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn distances_on_a_wedge() {
        let p = pl_realization(&corpus::w2(), 64).unwrap();
        let x = PLPoint { edge: 0, t: rat(1, 10) };
        let y = PLPoint { edge: 0, t: rat(9, 10) };
        assert_eq!(p.distance(&x, &y), rat(1, 5));
        let z = PLPoint { edge: 1, t: rat(1, 2) };
        assert_eq!(p.distance(&x, &z), rat(3, 5));
        assert_eq!(p.diameter_bound, rat(1, 1));
    }

    #[test]
    fn irrational_perron_value_uses_slopes_inside_the_enclosure() {
        let rule = WrappingRule::wedge_from_words(&[("a", "a b"), ("b", "a")]).unwrap();
        let p = pl_realization(&rule, 64).unwrap();
        for s in &p.slopes {
            assert!(p.lambda.contains(s));
        }
        assert!(p.lambda.width() < rat(1, 1 << 40));
    }
}
