//! Quantitative decay: sizes of the level-`n` intervals and contraction of lifted pairs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;
use serde::Serialize;

use super::{serialize_rat, PLError, PLPoint, PLRealization, SolenoidPoint};
use crate::ktheory::IntegerMatrix;
use crate::perron::{rat_pow, rat_string};
use crate::presolenoid::edge_cover_matrix;

/// Levels whose interval count is at most this are also enumerated interval by interval.
const EXPLICIT_CAP: u128 = 20_000;
/// Number of levels each sampled pair is lifted past the starting level.
const LIFT_LEVELS: usize = 6;

/// The components of an edge minus `h^{-n}(vertices)`, i.e. the level-`n` intervals.
#[derive(Clone, Debug, Serialize)]
pub struct LevelDecay {
    pub n: usize,
    /// Number of intervals on each edge.
    pub counts: Vec<String>,
    /// Equal to the column sums of `Hⁿ`.
    pub counts_match_matrix: bool,
    #[serde(serialize_with = "serialize_rat")]
    pub max_length: BigRational,
    /// `K·λ_hi^{-n}`, a lower bound for `K·λ^{-n}`.
    #[serde(serialize_with = "serialize_rat")]
    pub bound: BigRational,
    /// The level was also enumerated interval by interval, and the intervals tile each edge.
    pub explicit: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairDecay {
    pub samples: usize,
    pub start_level: usize,
    pub levels: usize,
    /// Largest `d(x_{i+1}, y_{i+1}) / d(x_i, y_i)` seen.
    #[serde(serialize_with = "serialize_rat")]
    pub max_ratio: BigRational,
    /// `1/λ_lo`.
    #[serde(serialize_with = "serialize_rat")]
    pub ratio_bound: BigRational,
    /// Smallest `C'` with `d(x_i, y_i) ≤ C'·λ_lo^{-i}` on every sampled level.
    pub fitted_constant: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    /// `K = 2·max ℓ`.
    #[serde(serialize_with = "serialize_rat")]
    pub k_constant: BigRational,
    pub seed: u64,
    pub levels: Vec<LevelDecay>,
    pub pairs: PairDecay,
    pub pass: bool,
}

/// Level-`n` intervals of `edge` as `(start, end)`, built from level `n − 1` by pulling
/// back through each branch in order.
fn explicit_intervals(p: &PLRealization, prev: &[Vec<(BigRational, BigRational)>]) -> Vec<Vec<(BigRational, BigRational)>> {
    let mut out = Vec::with_capacity(p.edge_count());
    for (j, pieces) in p.branches.iter().enumerate() {
        let mut ivs = Vec::new();
        for piece in pieces {
            let y = piece.letter;
            let ly = &p.lengths[y.edge];
            let pull = |t: &BigRational| {
                let u = if y.sign > 0 { t.clone() } else { ly - t };
                (&piece.image_start + u) / &p.slopes[j]
            };
            let mut sub: Vec<(BigRational, BigRational)> = prev[y.edge].iter().map(|(a, b)| (pull(a), pull(b))).collect();
            if y.sign < 0 {
                sub.reverse();
                sub.iter_mut().for_each(|iv| std::mem::swap(&mut iv.0, &mut iv.1));
            }
            ivs.extend(sub);
        }
        out.push(ivs);
    }
    out
}

fn tiles(p: &PLRealization, ivs: &[Vec<(BigRational, BigRational)>]) -> bool {
    ivs.iter().enumerate().all(|(j, list)| {
        let mut at = BigRational::zero();
        for (a, b) in list {
            if *a != at || b <= a {
                return false;
            }
            at = b.clone();
        }
        at == p.lengths[j]
    })
}

/// Checks, for `n = 0..=depth`, that every level-`n` interval has length at most
/// `K·λ^{-n}`; then lifts `samples` short intervals `[x_N, y_N]` (with `N = depth`) along
/// common random branches and checks each level contracts by at least `1/λ`.
pub fn decay_checks(p: &PLRealization, depth: usize, samples: usize, seed: u64) -> Result<DecayReport, PLError> {
    let n_edges = p.edge_count();
    let max_len = p.lengths.iter().max().cloned().unwrap();
    let k_constant = &max_len * BigRational::from_integer(BigInt::from(2));
    let h: IntegerMatrix = edge_cover_matrix(p.rule());
    let mut power = IntegerMatrix::identity(n_edges);
    let mut longest: Vec<BigRational> = p.lengths.clone();
    let mut counts: Vec<BigInt> = vec![BigInt::one(); n_edges];
    let mut explicit: Option<Vec<Vec<(BigRational, BigRational)>>> =
        Some(p.lengths.iter().map(|l| vec![(BigRational::zero(), l.clone())]).collect());
    let mut levels = Vec::new();
    for n in 0..=depth {
        if n > 0 {
            let mut next_longest = Vec::with_capacity(n_edges);
            let mut next_counts = Vec::with_capacity(n_edges);
            for (j, pieces) in p.branches.iter().enumerate() {
                let m = pieces.iter().map(|pc| &longest[pc.letter.edge]).max().unwrap() / &p.slopes[j];
                next_longest.push(m);
                next_counts.push(pieces.iter().map(|pc| &counts[pc.letter.edge]).sum::<BigInt>());
            }
            longest = next_longest;
            counts = next_counts;
            power = power.mul(&h);
            let total: BigInt = counts.iter().sum();
            explicit = match explicit {
                Some(prev) if total <= BigInt::from(EXPLICIT_CAP) => Some(explicit_intervals(p, &prev)),
                _ => None,
            };
        }
        let column_sums: Vec<BigInt> = (0..n_edges).map(|j| power.column(j).iter().sum()).collect();
        let max_length = longest.iter().max().cloned().unwrap();
        let bound = &k_constant / rat_pow(&p.lambda.hi, n as u32);
        let explicit_ok = explicit.as_ref().map(|ivs| {
            let m = ivs.iter().flatten().map(|(a, b)| b - a).max().unwrap();
            let counted = ivs.iter().zip(&counts).all(|(l, c)| BigInt::from(l.len()) == *c);
            tiles(p, ivs) && m == max_length && counted
        });
        let counts_match_matrix = column_sums == counts;
        levels.push(LevelDecay {
            n,
            counts: counts.iter().map(|c| c.to_string()).collect(),
            counts_match_matrix,
            holds: max_length <= bound && counts_match_matrix && explicit_ok != Some(false),
            max_length,
            bound,
            explicit: explicit_ok == Some(true),
        });
    }
    let pairs = pair_decay(p, depth, samples, seed)?;
    let pass = levels.iter().all(|l| l.holds) && pairs.holds;
    Ok(DecayReport { k_constant, seed, levels, pairs, pass })
}

fn pair_decay(p: &PLRealization, start: usize, samples: usize, seed: u64) -> Result<PairDecay, PLError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let ratio_bound = BigRational::one() / &p.lambda.lo;
    let mut max_ratio = BigRational::zero();
    let mut fitted = 0.0f64;
    let lambda_lo = p.lambda.lo.to_f64().unwrap_or(1.0);
    let mut holds = true;
    for _ in 0..samples {
        let x = SolenoidPoint::sample(p, start, &mut rng);
        let mut a = x.coords[start].clone();
        let len = &p.lengths[a.edge];
        // A nonzero offset of at most a quarter of the edge, so the graph distance is the
        // length of the interval at this level and every level above.
        let quarter = len / BigRational::from_integer(BigInt::from(4));
        let delta = &quarter * BigRational::new(BigInt::from(rng.gen_range(1u64..=1 << 20)), BigInt::from(1u64 << 20));
        let t = if &a.t + &delta < *len { &a.t + &delta } else { &a.t - &delta };
        let mut b = PLPoint { edge: a.edge, t };
        let mut d = p.distance(&a, &b);
        for i in 0..=LIFT_LEVELS {
            let level = start + i;
            fitted = fitted.max(d.to_f64().unwrap_or(f64::INFINITY) * lambda_lo.powi(level as i32));
            if i == LIFT_LEVELS {
                break;
            }
            let over = p.branches_over(&a);
            let br = over[rng.gen_range(0..over.len())];
            a = p.inverse_branch(&a, br)?;
            b = p.inverse_branch(&b, br)?;
            let next = p.distance(&a, &b);
            let ratio = &next / &d;
            if ratio > ratio_bound {
                holds = false;
            }
            if ratio > max_ratio {
                max_ratio = ratio;
            }
            d = next;
        }
    }
    Ok(PairDecay { samples, start_level: start, levels: LIFT_LEVELS, max_ratio, ratio_bound, fitted_constant: fitted, holds })
}

impl DecayReport {
    /// One line per level, for logs.
    pub fn summary(&self) -> Vec<String> {
        self.levels
            .iter()
            .map(|l| format!("n={} max={} bound={} holds={}", l.n, rat_string(&l.max_length), rat_string(&l.bound), l.holds))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::super::pl_realization;
    use super::*;
    use crate::presolenoid::corpus;

    #[test]
    fn w2_level_five_is_an_exact_subdivision() {
        let p = pl_realization(&corpus::w2(), 64).unwrap();
        let r = decay_checks(&p, 5, 20, 3).unwrap();
        assert!(r.pass);
        let l5 = &r.levels[5];
        assert_eq!(l5.max_length, BigRational::new(1.into(), 32.into()));
        assert!(l5.explicit);
        assert_eq!(r.levels[0].bound, r.k_constant);
    }

    #[test]
    fn w4_pairs_contract_by_a_third() {
        let p = pl_realization(&corpus::w4(), 64).unwrap();
        let r = decay_checks(&p, 4, 100, 7).unwrap();
        assert!(r.pass);
        assert_eq!(r.pairs.max_ratio, BigRational::new(1.into(), 3.into()));
        assert!(r.pairs.max_ratio <= r.pairs.ratio_bound);
    }

    #[test]
    fn every_corpus_rule_to_level_ten() {
        for rule in [corpus::w1(), corpus::w2(), corpus::w3(), corpus::w4(), corpus::dyadic()] {
            let p = pl_realization(&rule, 64).unwrap();
            let r = decay_checks(&p, 10, 10, 1).unwrap();
            assert!(r.pass, "{:?}", r.summary());
        }
    }
}
