//! Orientation decisions via parity union-find.

use std::collections::BTreeMap;

use serde::Serialize;

use super::WrappingRule;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrientationVerdict {
    pub positively_oriented: bool,
    pub negatively_oriented: bool,
    /// Signs per edge id witnessing positive orientation.
    pub positive_witness: Option<BTreeMap<String, i8>>,
    /// Signs per edge id witnessing negative orientation.
    pub negative_witness: Option<BTreeMap<String, i8>>,
}

impl OrientationVerdict {
    pub fn oriented(&self) -> bool {
        self.positively_oriented || self.negatively_oriented
    }
}

/// Union-find over `{±1}`-valued unknowns with constraints `s_i · s_j = c`.
struct ParityUnionFind {
    parent: Vec<usize>,
    /// Parity of a node relative to its parent (true means opposite signs).
    flip: Vec<bool>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        ParityUnionFind { parent: (0..n).collect(), flip: vec![false; n] }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        let p = self.parent[x];
        if p == x {
            return (x, false);
        }
        let (root, pf) = self.find(p);
        self.parent[x] = root;
        self.flip[x] ^= pf;
        (root, self.flip[x])
    }

    /// Records `s_a · s_b = (opposite ? −1 : +1)`; returns `false` on contradiction.
    fn relate(&mut self, a: usize, b: usize, opposite: bool) -> bool {
        let (ra, fa) = self.find(a);
        let (rb, fb) = self.find(b);
        if ra == rb {
            return (fa ^ fb) == opposite;
        }
        self.parent[ra] = rb;
        self.flip[ra] = fa ^ fb ^ opposite;
        true
    }

    fn signs(&mut self) -> Vec<i8> {
        (0..self.parent.len()).map(|x| if self.find(x).1 { -1 } else { 1 }).collect()
    }
}

/// Solves `s_i · s_j = polarity · ε` over every occurrence `e_i^ε` in the word of `e_j`.
fn solve(rule: &WrappingRule, polarity: i8) -> Option<Vec<i8>> {
    let mut uf = ParityUnionFind::new(rule.edge_count());
    for (j, w) in rule.words().iter().enumerate() {
        for l in w {
            let target = polarity * l.sign;
            if !uf.relate(l.edge, j, target < 0) {
                return None;
            }
        }
    }
    Some(uf.signs())
}

fn witness(rule: &WrappingRule, signs: Vec<i8>) -> BTreeMap<String, i8> {
    signs.into_iter().enumerate().map(|(e, s)| (rule.edge_id(e).to_string(), s)).collect()
}

/// Decides positive and negative orientability.
pub fn orientation_check(rule: &WrappingRule) -> OrientationVerdict {
    let pos = solve(rule, 1);
    let neg = solve(rule, -1);
    OrientationVerdict {
        positively_oriented: pos.is_some(),
        negatively_oriented: neg.is_some(),
        positive_witness: pos.map(|s| witness(rule, s)),
        negative_witness: neg.map(|s| witness(rule, s)),
    }
}
