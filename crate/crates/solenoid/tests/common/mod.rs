//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use solenoid::building_blocks::{stabilize, PassageSystem, StabilizeOptions};
use solenoid::dihedral::{build_diagram, OrderedBratteli};
use solenoid::presolenoid::{validate_axioms, AxiomOptions, Graph, Letter, Turn, WrappingRule};

pub fn bundled(name: &str) -> WrappingRule {
    solenoid::corpus::rule(name).unwrap_or_else(|| panic!("no bundled rule {name}"))
}

pub fn passages(rule: &WrappingRule) -> PassageSystem {
    stabilize(rule, &StabilizeOptions::default()).expect("stabilizes")
}

pub fn diagram(name: &str) -> OrderedBratteli {
    build_diagram(&passages(&bundled(name))).expect("diagram")
}

/// A reduced word of length `len` over `edges` letters (no `x x⁻¹` neighbours).
fn random_word<R: Rng>(rng: &mut R, edges: usize, len: usize) -> Vec<Letter> {
    let mut w: Vec<Letter> = Vec::with_capacity(len);
    while w.len() < len {
        let e = rng.gen_range(0..edges);
        let l = if rng.gen_bool(0.5) { Letter::pos(e) } else { Letter::neg(e) };
        if w.last().is_some_and(|&p| p == l.inverse()) {
            continue;
        }
        w.push(l);
    }
    w
}

/// Random wedge rules on 1–3 loops with words of length 2–5, in generation order.
pub fn random_wedge_rule<R: Rng>(rng: &mut R) -> WrappingRule {
    let edges = rng.gen_range(1..=3);
    let ids: Vec<String> = (0..edges).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let words = (0..edges).map(|_| {
        let len = rng.gen_range(2..=5);
        random_word(rng, edges, len)
    });
    WrappingRule::new(Graph::wedge(&refs), words.collect()).expect("wedge words are valid paths")
}

/// Rules `e ↦ u·c·u⁻¹` on 2–3 loops (`|u| ≤ 2`, `c` a single letter). Uniform draws that
/// pass every axiom are almost always oriented; this family supplies the twisted ones.
pub fn random_conjugation_rule<R: Rng>(rng: &mut R) -> WrappingRule {
    let edges = rng.gen_range(2..=3);
    let ids: Vec<String> = (0..edges).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let words = (0..edges).map(|_| loop {
        let ulen = rng.gen_range(1..=2);
        let u = random_word(rng, edges, ulen);
        let c = random_word(rng, edges, 1)[0];
        let mut w = u.clone();
        w.push(c);
        w.extend(u.iter().rev().map(|l| l.inverse()));
        if w.windows(2).all(|p| p[1] != p[0].inverse()) {
            break w;
        }
    });
    WrappingRule::new(Graph::wedge(&refs), words.collect()).expect("wedge words are valid paths")
}

/// `count` rules passing every axiom: the first half from uniform wedge draws, the rest
/// from the conjugation family. Also returns the number of draws.
pub fn fuzz_corpus(count: usize, seed: u64) -> (Vec<WrappingRule>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut drawn = 0;
    while out.len() < count {
        drawn += 1;
        let rule = if out.len() < count / 2 { random_wedge_rule(&mut rng) } else { random_conjugation_rule(&mut rng) };
        if validate_axioms(&rule, &AxiomOptions::default()).all_pass() {
            out.push(rule);
        }
    }
    (out, drawn)
}

/// `N(k) = #{g ∈ ℤ³/Aℤ³ : k·g = 0}` for every divisor `k` of `|det A|`, by enumerating all
/// residues mod `|det A|`. A vector `x` lies in `Aℤ³` exactly when `adj(A)·x ≡ 0 (mod det A)`,
/// and `|det A|·ℤ³ ⊆ Aℤ³`, so each class is hit `det²` times.
pub fn residue_torsion_counts(a: [[i64; 3]; 3]) -> Vec<(i64, u64)> {
    let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    let d = det.abs();
    assert!(d > 0, "singular matrix");
    let cof = |i: usize, j: usize| {
        let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
        let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
        let m = a[r[0]][c[0]] * a[r[1]][c[1]] - a[r[0]][c[1]] * a[r[1]][c[0]];
        if (i + j).is_multiple_of(2) { m } else { -m }
    };
    // adj[i][j] = cofactor(j, i)
    let adj: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| cof(j, i).rem_euclid(d)).collect()).collect();
    let divisors: Vec<i64> = (1..=d).filter(|k| d % k == 0).collect();
    let mut hits = vec![0u64; divisors.len()];
    for x0 in 0..d {
        for x1 in 0..d {
            for x2 in 0..d {
                let y: Vec<i64> = adj.iter().map(|row| (row[0] * x0 + row[1] * x1 + row[2] * x2) % d).collect();
                for (h, k) in hits.iter_mut().zip(&divisors) {
                    if y.iter().all(|v| (v * k) % d == 0) {
                        *h += 1;
                    }
                }
            }
        }
    }
    let classes = (d * d) as u64;
    divisors.into_iter().zip(hits).map(|(k, h)| (k, h / classes)).collect()
}

/// The same counts for `⊕ ℤ/s_i`: `Π gcd(k, s_i)`.
pub fn torsion_counts_of(factors: &[i64], k: i64) -> u64 {
    factors.iter().map(|&s| num_integer::gcd(k, s) as u64).product()
}

/// A random 3×3 matrix with entries in `-bound..=bound` and `1 ≤ |det| ≤ max_det`.
pub fn random_small_cokernel_matrix<R: Rng>(rng: &mut R, bound: i64, max_det: i64) -> [[i64; 3]; 3] {
    loop {
        let mut a = [[0i64; 3]; 3];
        for row in a.iter_mut() {
            for v in row.iter_mut() {
                *v = rng.gen_range(-bound..=bound);
            }
        }
        let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
        if det != 0 && det.abs() <= max_det {
            return a;
        }
    }
}

/// Letter and turn counts of `g^k(letter)`, with its first and last letters.
#[derive(Clone)]
pub struct WordStats {
    pub letters: Vec<BigInt>,
    pub turns: BTreeMap<Turn, BigInt>,
    pub first: Letter,
    pub last: Letter,
}

impl WordStats {
    fn inverted(&self) -> WordStats {
        // Reversing and inverting a word keeps every junction turn (turns are unordered).
        WordStats { letters: self.letters.clone(), turns: self.turns.clone(), first: self.last.inverse(), last: self.first.inverse() }
    }

    fn append(&mut self, next: &WordStats) {
        *self.turns.entry(Turn::at_junction(self.last, next.first)).or_default() += 1;
        for (t, c) in &next.turns {
            *self.turns.entry(*t).or_default() += c;
        }
        for (x, y) in self.letters.iter_mut().zip(&next.letters) {
            *x += y;
        }
        self.last = next.last;
    }
}

/// Stats of `g^k(e)` for `k = 1..=levels` on every positive letter `e`, built as
/// `g^k(e) = g^{k−1}(x₁)·…·g^{k−1}(x_m)` with `g(e) = x₁…x_m`, never writing the word out.
pub fn expanded_stats(rule: &WrappingRule, levels: usize) -> Vec<Vec<WordStats>> {
    let n = rule.edge_count();
    let unit = |l: Letter| {
        let mut letters = vec![BigInt::from(0); n];
        letters[l.edge] = BigInt::from(1);
        WordStats { letters, turns: BTreeMap::new(), first: l, last: l }
    };
    let mut prev: Vec<WordStats> = (0..n).map(|e| unit(Letter::pos(e))).collect();
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        let of = |l: Letter| if l.sign > 0 { prev[l.edge].clone() } else { prev[l.edge].inverted() };
        let next: Vec<WordStats> = (0..n)
            .map(|e| {
                let w = rule.word(e);
                let mut acc = of(w[0]);
                for &l in &w[1..] {
                    acc.append(&of(l));
                }
                acc
            })
            .collect();
        out.push(next.clone());
        prev = next;
    }
    out
}
