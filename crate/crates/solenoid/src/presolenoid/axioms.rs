//! Decision procedures for the five pre-solenoid axioms.

use std::collections::{BTreeSet, VecDeque};

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{edge_cover_matrix, germ_map, germs_at_vertices, junction_turns, Germ, Turn, WrappingRule};
use crate::ktheory::matrix::IntegerMatrix;
use crate::perron::{perron, rat_string, PerronData, PerronSummary, DEFAULT_PRECISION_BITS};

#[derive(Clone, Copy, Debug)]
pub struct AxiomOptions {
    /// Iterations of brute-force word expansion used to cross-check non-folding.
    pub fold_bound: u32,
    /// Total letters allowed during the brute-force expansion.
    pub letter_budget: usize,
    /// Perron enclosures are refined to width ≤ 2^-precision.
    pub precision: u32,
}

impl Default for AxiomOptions {
    fn default() -> Self {
        AxiomOptions { fold_bound: 6, letter_budget: 2_000_000, precision: DEFAULT_PRECISION_BITS }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Mixing {
    pub pass: bool,
    /// Least `k` with `H^k > 0`, when it exists within the Wielandt bound.
    pub exponent: Option<u32>,
    pub bound: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct Expansion {
    /// `true` only when the Perron metric certifies λ > 1.
    pub pass: bool,
    pub status: String,
    pub lambda: Option<PerronSummary>,
    /// Edge lengths (left Perron vector, max 1) as exact rationals.
    pub lengths: Vec<String>,
    /// Image length over length, per edge; each lies in the λ enclosure.
    pub slopes: Vec<String>,
    #[serde(skip)]
    pub perron: Option<PerronData>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Nonfolding {
    pub pass: bool,
    /// Degenerate turn reached by the closure and the number of germ-map applications.
    pub witness: Option<(String, u32)>,
    pub closure_size: usize,
    /// Depth reached by the brute-force expansion and whether it agrees with the closure.
    pub brute_force_depth: u32,
    pub brute_force_agrees: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Flattening {
    pub pass: bool,
    pub depth: Option<u32>,
    /// Per vertex: the germs in the image of the germs at that vertex, at the reported depth.
    pub limit_germs: Vec<Vec<String>>,
    #[serde(skip)]
    pub limit_germ_values: Vec<Vec<Germ>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub markov: bool,
    pub nonfolding: Nonfolding,
    pub mixing: Mixing,
    pub expansion: Expansion,
    pub flattening: Flattening,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.markov && self.nonfolding.pass && self.mixing.pass && self.expansion.pass && self.flattening.pass
    }

    /// Names of the failed axioms.
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.markov {
            out.push("markov");
        }
        if !self.nonfolding.pass {
            out.push("nonfolding");
        }
        if !self.mixing.pass {
            out.push("mixing");
        }
        if !self.expansion.pass {
            out.push("expansion");
        }
        if !self.flattening.pass {
            out.push("flattening");
        }
        out
    }
}

/// Least `k ≤ bound` with `A^k` entrywise positive (boolean arithmetic).
pub fn primitivity_exponent(h: &IntegerMatrix) -> (Option<u32>, u32) {
    let n = h.rows();
    let bound = ((n as u32).saturating_sub(1)).pow(2) + 1;
    let b: Vec<bool> = h.entries().iter().map(|x| x > &0.into()).collect();
    let mut p = b.clone();
    for k in 1..=bound {
        if p.iter().all(|&x| x) {
            return (Some(k), bound);
        }
        let mut next = vec![false; n * n];
        for i in 0..n {
            for l in 0..n {
                if !p[i * n + l] {
                    continue;
                }
                for j in 0..n {
                    if b[l * n + j] {
                        next[i * n + j] = true;
                    }
                }
            }
        }
        p = next;
    }
    (None, bound)
}

fn check_mixing(h: &IntegerMatrix) -> Mixing {
    let (exponent, bound) = primitivity_exponent(h);
    Mixing { pass: exponent.is_some(), exponent, bound }
}

fn check_expansion(h: &IntegerMatrix, precision: u32) -> Expansion {
    let none = |status: &str| Expansion {
        pass: false,
        status: status.to_string(),
        lambda: None,
        lengths: Vec::new(),
        slopes: Vec::new(),
        perron: None,
    };
    let Ok(p) = perron(h, precision) else { return none("not certified: Perron data unavailable") };
    let one = BigRational::one();
    let pass = p.lambda.enclosure.lo > one;
    let status = if pass {
        "certified"
    } else if p.lambda.enclosure.hi <= one {
        "not certified: Perron value ≤ 1"
    } else {
        "not certified: enclosure straddles 1"
    };
    Expansion {
        pass,
        status: status.to_string(),
        lambda: Some((&p.lambda).into()),
        lengths: p.left.iter().map(rat_string).collect(),
        slopes: p.left_ratios.iter().map(rat_string).collect(),
        perron: Some(p),
    }
}

/// All turns of all iterates: junction turns of the words, closed under `Dh`.
/// Returns the closure and, if one occurs, a degenerate turn with its depth.
pub fn turn_closure(rule: &WrappingRule) -> (BTreeSet<Turn>, Option<(Turn, u32)>) {
    let dh = germ_map(rule);
    let mut seen: BTreeSet<Turn> = BTreeSet::new();
    let mut queue: VecDeque<(Turn, u32)> = VecDeque::new();
    for w in rule.words() {
        for t in junction_turns(w) {
            if seen.insert(t) {
                queue.push_back((t, 0));
            }
        }
    }
    let mut witness: Option<(Turn, u32)> = None;
    while let Some((t, depth)) = queue.pop_front() {
        if t.is_degenerate() && witness.is_none_or(|(_, d)| depth < d) {
            witness = Some((t, depth));
        }
        let next = t.map(&dh);
        if seen.insert(next) {
            queue.push_back((next, depth + 1));
        }
    }
    (seen, witness)
}

/// Expands `h^k` for `k = 1, 2, …` and reports the first iterate containing a cancellation,
/// together with the depth actually reached within the budget.
pub fn brute_force_fold(rule: &WrappingRule, max_iter: u32, budget: usize) -> (Option<u32>, u32) {
    let mut words: Vec<Vec<super::Letter>> = rule.words().to_vec();
    let mut reached = 0;
    for k in 1..=max_iter {
        if k > 1 {
            let total: usize = words.iter().map(|w| w.iter().map(|l| rule.word(l.edge).len()).sum::<usize>()).sum();
            if total > budget {
                break;
            }
            words = words.iter().map(|w| rule.apply_to_word(w)).collect();
        }
        reached = k;
        if words.iter().any(|w| w.windows(2).any(|p| p[1] == p[0].inverse())) {
            return (Some(k), reached);
        }
    }
    (None, reached)
}

fn check_nonfolding(rule: &WrappingRule, opts: &AxiomOptions) -> Nonfolding {
    let (closure, witness) = turn_closure(rule);
    let (brute, depth) = brute_force_fold(rule, opts.fold_bound, opts.letter_budget);
    // A degenerate turn first appearing after `d` germ-map steps shows up in h^(d+1).
    let agrees = match (&witness, brute) {
        (None, None) => true,
        (Some((_, d)), Some(k)) => k == d + 1,
        (Some((_, d)), None) => d + 1 > depth,
        (None, Some(_)) => false,
    };
    Nonfolding {
        pass: witness.is_none(),
        witness: witness.map(|(t, d)| (t.label(rule.graph()), d)),
        closure_size: closure.len(),
        brute_force_depth: depth,
        brute_force_agrees: agrees,
    }
}

fn check_flattening(rule: &WrappingRule) -> Flattening {
    let dh = germ_map(rule);
    let at = germs_at_vertices(rule.graph());
    let max_d = 2 * rule.edge_count() as u32;
    let mut current: Vec<BTreeSet<Germ>> = at.iter().map(|gs| gs.iter().copied().collect()).collect();
    for d in 1..=max_d {
        current = current.iter().map(|s| s.iter().map(|&g| dh.apply(g)).collect()).collect();
        if current.iter().all(|s| s.len() == 2) {
            let values: Vec<Vec<Germ>> = current.iter().map(|s| s.iter().copied().collect()).collect();
            return Flattening {
                pass: true,
                depth: Some(d),
                limit_germs: values.iter().map(|v| v.iter().map(|g| g.label(rule.graph())).collect()).collect(),
                limit_germ_values: values,
            };
        }
    }
    Flattening { pass: false, depth: None, limit_germs: Vec::new(), limit_germ_values: Vec::new() }
}

/// Checks the Markov, non-folding, mixing, expansion and flattening axioms.
pub fn validate_axioms(rule: &WrappingRule, opts: &AxiomOptions) -> AxiomReport {
    let h = edge_cover_matrix(rule);
    let mixing = check_mixing(&h);
    let expansion = check_expansion(&h, opts.precision);
    AxiomReport {
        markov: true,
        nonfolding: check_nonfolding(rule, opts),
        mixing,
        expansion,
        flattening: check_flattening(rule),
    }
}
