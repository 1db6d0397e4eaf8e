//! The interval substitution system: level data `(a_i, b_i)` and occurrence orientations.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use super::blocks::{BlockError, BuildingBlock};
use super::PassageSystem;
use crate::ktheory::matrix::serialize_bigint_vec;
use crate::presolenoid::{orientation_check, power, WrappingRule};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum IntervalError {
    #[error("levels must be at least 1")]
    NoLevels,
    #[error("level {level} needs {required} letters, over the budget of {budget}")]
    Budget { level: usize, required: BigInt, budget: u128 },
    #[error("level {0} is outside the computed range")]
    OutOfRange(usize),
    #[error(transparent)]
    Block(#[from] BlockError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalLevel {
    /// Passage counts in the level word.
    #[serde(serialize_with = "serialize_bigint_vec")]
    pub a: Vec<BigInt>,
    /// Letter counts in the level word.
    #[serde(serialize_with = "serialize_bigint_vec")]
    pub b: Vec<BigInt>,
}

/// Outcome of the normalization making occurrence orientations uniform or fully mixed.
#[derive(Clone, Debug, Serialize)]
pub struct N5Normalization {
    /// `uniform` (all increasing after the logged steps), `mixed` (every pair carries both
    /// orientations), or `unreached`.
    pub case: String,
    pub log: Vec<String>,
    /// Occurrence signs after normalization: `[i][j]` lists the signs of `e_j` inside `g(e_i)`.
    pub signs: Vec<Vec<Vec<i8>>>,
    #[serde(skip)]
    pub rule: WrappingRule,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalSystem {
    /// Index of the start interval: the interior of this edge of the stabilized rule.
    pub start_edge: usize,
    /// First level at which the level word covers every edge.
    pub d0: usize,
    /// Levels `1..=levels`.
    pub levels: Vec<IntervalLevel>,
    /// `[i][j]`: signs of the occurrences of `e_j` inside the word of `e_i` (stabilized rule).
    pub occurrence_signs: Vec<Vec<Vec<i8>>>,
    pub normalization: N5Normalization,
}

fn occurrence_signs(rule: &WrappingRule) -> Vec<Vec<Vec<i8>>> {
    let n = rule.edge_count();
    rule.words()
        .iter()
        .map(|w| {
            let mut row = vec![Vec::new(); n];
            for l in w {
                row[l.edge].push(l.sign);
            }
            row
        })
        .collect()
}

fn all_increasing(signs: &[Vec<Vec<i8>>]) -> bool {
    signs.iter().flatten().flatten().all(|&s| s > 0)
}

fn all_pairs_mixed(signs: &[Vec<Vec<i8>>]) -> bool {
    signs.iter().flatten().all(|occ| occ.contains(&1) && occ.contains(&-1))
}

/// Applies the edge flips / squarings that make orientations uniform (oriented case) or
/// shows every pair carries both orientations (non-orientable case).
pub fn normalize_orientations(rule: &WrappingRule) -> N5Normalization {
    let mut log = Vec::new();
    let verdict = orientation_check(rule);
    let flips_from = |w: &std::collections::BTreeMap<String, i8>| -> Vec<bool> {
        (0..rule.edge_count()).map(|e| w[rule.edge_id(e)] < 0).collect()
    };
    let mut current = rule.clone();
    let case;
    if verdict.oriented() {
        let (witness, negative) = match &verdict.positive_witness {
            Some(w) => (w, false),
            None => (verdict.negative_witness.as_ref().unwrap(), true),
        };
        let flip = flips_from(witness);
        for (e, &f) in flip.iter().enumerate() {
            if f {
                log.push(format!("reverse edge {}", rule.edge_id(e)));
            }
        }
        current = current.with_flipped_edges(&flip);
        if negative {
            log.push("all occurrences decreasing: square the rule".to_string());
            current = power(&current, 2).expect("square of a stabilized rule");
        }
        case = if all_increasing(&occurrence_signs(&current)) { "uniform" } else { "unreached" };
    } else {
        let mut squarings = 0;
        while !all_pairs_mixed(&occurrence_signs(&current)) && squarings < 3 {
            match power(&current, 2) {
                Ok(sq) => {
                    log.push("some pair has a single orientation: square the rule".to_string());
                    current = sq;
                    squarings += 1;
                }
                Err(e) => {
                    log.push(format!("cannot square further: {e}"));
                    break;
                }
            }
        }
        case = if all_pairs_mixed(&occurrence_signs(&current)) { "mixed" } else { "unreached" };
    }
    if log.is_empty() {
        log.push("no change needed".to_string());
    }
    N5Normalization { case: case.to_string(), log, signs: occurrence_signs(&current), rule: current }
}

/// Level data of the words `g^i(e₁)` for `i = 1..=levels`, via
/// `b_{i+1} = H·b_i` and `a_{i+1} = X·a_i + N·b_i`.
pub fn interval_system(ps: &PassageSystem, levels: usize, budget: u128) -> Result<IntervalSystem, IntervalError> {
    if levels == 0 {
        return Err(IntervalError::NoLevels);
    }
    let g = &ps.rule;
    let start = 0;
    let word = g.word(start);
    let mut b: Vec<BigInt> = vec![BigInt::zero(); ps.edge_count()];
    for l in word {
        b[l.edge] += 1;
    }
    let mut a: Vec<BigInt> = vec![BigInt::zero(); ps.passage_count()];
    for t in crate::presolenoid::junction_turns(word) {
        a[ps.passage_index(t).expect("turn of the stabilized rule")] += 1;
    }
    let budget_big = BigInt::from(budget);
    let mut out = Vec::with_capacity(levels);
    for level in 1..=levels {
        if level > 1 {
            let xa = ps.x.mul_vec(&a);
            let nb = ps.n.mul_vec(&b);
            a = xa.into_iter().zip(nb).map(|(p, q)| p + q).collect();
            b = ps.h.mul_vec(&b);
        }
        let total: BigInt = b.iter().sum();
        if total > budget_big {
            return Err(IntervalError::Budget { level, required: total, budget });
        }
        out.push(IntervalLevel { a: a.clone(), b: b.clone() });
    }
    let d0 = out.iter().position(|lv| lv.b.iter().all(|x| x > &BigInt::zero())).map_or(0, |i| i + 1);
    Ok(IntervalSystem {
        start_edge: start,
        d0,
        levels: out,
        occurrence_signs: occurrence_signs(g),
        normalization: normalize_orientations(g),
    })
}

/// The block `A(a_i, b_i, I, U)` at a computed level.
pub fn building_block_at(iv: &IntervalSystem, ps: &PassageSystem, level: usize) -> Result<BuildingBlock, IntervalError> {
    let lv = level.checked_sub(1).and_then(|k| iv.levels.get(k)).ok_or(IntervalError::OutOfRange(level))?;
    let mut block = BuildingBlock::new(lv.a.clone(), lv.b.clone(), ps.i.clone(), ps.u.clone())?;
    block.full = Some(ps.n.is_positive());
    Ok(block)
}
