//! Künneth assembly of K-groups of a tensor product from the K-groups of the factors.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;

use super::groups::AbelianGroup;

/// `(K₀, K₁)` of one algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KPair {
    pub k0: AbelianGroup,
    pub k1: AbelianGroup,
}

fn nonzero_note(g: &AbelianGroup) -> Option<String> {
    (!g.is_zero()).then(|| g.describe())
}

/// `A ⊗ B` for groups in the representable class; unresolved parts propagate.
pub fn tensor(a: &AbelianGroup, b: &AbelianGroup) -> AbelianGroup {
    let mut out = AbelianGroup::free(a.free_rank * b.free_rank);
    for _ in 0..a.free_rank {
        for t in &b.torsion {
            out = out.direct_sum(AbelianGroup::cyclic(t.clone()));
        }
        out.stationary.extend(b.stationary.iter().cloned());
    }
    for _ in 0..b.free_rank {
        for t in &a.torsion {
            out = out.direct_sum(AbelianGroup::cyclic(t.clone()));
        }
        out.stationary.extend(a.stationary.iter().cloned());
    }
    for s in &a.torsion {
        for t in &b.torsion {
            out = out.direct_sum(AbelianGroup::cyclic(s.gcd(t)));
        }
    }
    for s in &a.stationary {
        for t in &b.torsion {
            for c in s.tensor_cyclic(t) {
                out = out.direct_sum(AbelianGroup::cyclic(c));
            }
        }
        for t in &b.stationary {
            out.stationary.push(s.tensor(t));
        }
    }
    for t in &b.stationary {
        for s in &a.torsion {
            for c in t.tensor_cyclic(s) {
                out = out.direct_sum(AbelianGroup::cyclic(c));
            }
        }
    }
    for u in &a.unresolved {
        if let Some(d) = nonzero_note(&strip_unresolved(b)) {
            out.unresolved.push(format!("({u}) ⊗ ({d})"));
        }
        for v in &b.unresolved {
            out.unresolved.push(format!("({u}) ⊗ ({v})"));
        }
    }
    for v in &b.unresolved {
        if let Some(d) = nonzero_note(&strip_unresolved(a)) {
            out.unresolved.push(format!("({d}) ⊗ ({v})"));
        }
    }
    out
}

fn strip_unresolved(g: &AbelianGroup) -> AbelianGroup {
    AbelianGroup { unresolved: Vec::new(), ..g.clone() }
}

/// `Tor(A, B)`: only torsion against torsion contributes; unresolved parts propagate when
/// they meet torsion or other unresolved parts.
pub fn tor(a: &AbelianGroup, b: &AbelianGroup) -> AbelianGroup {
    let mut out = AbelianGroup::zero();
    for s in &a.torsion {
        for t in &b.torsion {
            out = out.direct_sum(AbelianGroup::cyclic(s.gcd(t)));
        }
    }
    let torsion_note = |g: &AbelianGroup| -> Option<String> {
        (!g.torsion.is_empty()).then(|| g.torsion.iter().map(|t| format!("ℤ/{t}")).collect::<Vec<_>>().join(" ⊕ "))
    };
    for u in &a.unresolved {
        if let Some(d) = torsion_note(b) {
            out.unresolved.push(format!("Tor({u}, {d})"));
        }
        for v in &b.unresolved {
            out.unresolved.push(format!("Tor({u}, {v})"));
        }
    }
    for v in &b.unresolved {
        if let Some(d) = torsion_note(a) {
            out.unresolved.push(format!("Tor({d}, {v})"));
        }
    }
    out
}

/// K-theory of the tensor product via the (split) Künneth sequence:
/// `K₀ = K₀⊗K₀' ⊕ K₁⊗K₁' ⊕ Tor(K₀,K₁') ⊕ Tor(K₁,K₀')` and
/// `K₁ = K₀⊗K₁' ⊕ K₁⊗K₀' ⊕ Tor(K₀,K₀') ⊕ Tor(K₁,K₁')`.
pub fn kunneth(left: &KPair, right: &KPair) -> KPair {
    let k0 = tensor(&left.k0, &right.k0)
        .direct_sum(tensor(&left.k1, &right.k1))
        .direct_sum(tor(&left.k0, &right.k1))
        .direct_sum(tor(&left.k1, &right.k0));
    let k1 = tensor(&left.k0, &right.k1)
        .direct_sum(tensor(&left.k1, &right.k0))
        .direct_sum(tor(&left.k0, &right.k0))
        .direct_sum(tor(&left.k1, &right.k1));
    KPair { k0, k1 }
}

/// Torsion orders as a sorted list, for comparisons.
pub fn torsion_multiset(g: &AbelianGroup) -> Vec<BigInt> {
    let mut t = g.torsion.clone();
    t.sort();
    t
}

#[cfg(test)]
mod tests {
    use super::super::groups::StationaryGroup;
    use super::super::matrix::IntegerMatrix;
    use super::*;

    fn st(rows: &[Vec<i64>]) -> AbelianGroup {
        AbelianGroup::stationary(StationaryGroup::standard(IntegerMatrix::from_rows(rows)))
    }

    #[test]
    fn w2_homoclinic_groups() {
        let left = KPair { k0: st(&[vec![4]]), k1: AbelianGroup::free(1) };
        let right = KPair { k0: st(&[vec![1, 1], vec![1, 1]]), k1: AbelianGroup::free(1) };
        let k = kunneth(&left, &right);
        assert_eq!(k.k0.describe(), "ℤ ⊕ ℤ[1/2]");
        assert_eq!(k.k1.describe(), "ℤ[1/2] ⊕ ℤ[1/2]");
    }

    #[test]
    fn small_identities() {
        assert_eq!(tensor(&AbelianGroup::cyclic(2), &st(&[vec![3]])), AbelianGroup::cyclic(2));
        assert_eq!(tor(&AbelianGroup::cyclic(2), &AbelianGroup::cyclic(2)), AbelianGroup::cyclic(2));
        assert!(tor(&AbelianGroup::free(3), &AbelianGroup::cyclic(2)).is_zero());
        assert!(tensor(&AbelianGroup::cyclic(2), &AbelianGroup::cyclic(3)).is_zero());
    }

    #[test]
    fn unresolved_parts_propagate() {
        let mut g = AbelianGroup::cyclic(2);
        g.unresolved.push("free part".into());
        let k = kunneth(&KPair { k0: g, k1: AbelianGroup::zero() }, &KPair { k0: AbelianGroup::free(1), k1: AbelianGroup::free(1) });
        assert!(!k.k0.unresolved.is_empty());
        assert!(!k.k1.unresolved.is_empty());
        assert_eq!(k.k0.torsion, vec![BigInt::from(2)]);
    }
}
