//! K-groups of the algebra of the inverse map, split by the orientation dichotomy.

use num_bigint::BigInt;
use serde::Serialize;

use super::groups::{AbelianGroup, StationaryGroup};
use super::matrix::IntegerMatrix;
use super::KTheoryError;
use crate::building_blocks::PassageSystem;
use crate::dihedral::{build_diagram, DihedralError};
use crate::presolenoid::{orientation_check, WrappingRule};

const ENUMERATION_CAP: u128 = 4_000_000;

/// Finite-depth stand-in for the torsion-free part of `K₀` in the non-orientable case.
///
/// At depth `D`, `S`-symmetric cylinder functions form `ℤ^{classes}`; dividing by
/// `χ_x − χ_{φ(x)}` for every cylinder `x` on which `φ` is determined leaves a free group
/// whose rank is the number of components below. Exit cylinders contribute no relation,
/// so the ranks do not stabilise as the depth grows.
#[derive(Clone, Debug, Serialize)]
pub struct DepthRankReport {
    pub depth: usize,
    pub cylinders: u64,
    pub s_classes: u64,
    pub relations: u64,
    pub exit_cylinders: u64,
    pub free_rank: u64,
    pub components_without_exit: u64,
    pub components_with_exit: u64,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct KInverse {
    pub oriented: bool,
    pub k0: AbelianGroup,
    pub k1: AbelianGroup,
    /// `A_{ij}` = occurrences of `e_j` in `h(e_i)`, oriented case only.
    pub matrix: Option<IntegerMatrix>,
    pub depth_report: Option<DepthRankReport>,
}

/// `A_{ij}` = number of letters `e_j^{±1}` in the word of `e_i`.
pub fn occurrence_matrix(rule: &WrappingRule) -> IntegerMatrix {
    let n = rule.edge_count();
    let mut a = IntegerMatrix::zeros(n, n);
    for i in 0..n {
        for l in rule.word(i) {
            *a.entry_mut(i, l.edge) += 1;
        }
    }
    a
}

fn dihedral_err(e: DihedralError) -> KTheoryError {
    match e {
        DihedralError::Unsupported(s) => KTheoryError::Unsupported(s),
        other => KTheoryError::Precondition(other.to_string()),
    }
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// Ranks of the depth-`depth` approximation described on [`DepthRankReport`].
pub fn depth_rank_report(ps: &PassageSystem, depth: usize) -> Result<DepthRankReport, KTheoryError> {
    let d = build_diagram(ps).map_err(dihedral_err)?;
    let count = d.cylinder_count(depth).map_err(dihedral_err)?;
    if count > ENUMERATION_CAP {
        return Err(KTheoryError::Precondition(format!("{count} cylinders at depth {depth} exceed the enumeration cap")));
    }
    let classes = (count / 2) as usize;
    let mut parent: Vec<usize> = (0..classes).collect();
    let mut has_exit = vec![false; classes];
    let mut relations = 0u64;
    let mut exits = 0u64;
    for x in d.cylinders(depth).map_err(dihedral_err)? {
        let cx = d.cylinder_index(&x) / 2;
        if d.is_exit(&x) {
            exits += 1;
            has_exit[cx] = true;
            continue;
        }
        let y = d.phi(&x).map_err(dihedral_err)?;
        let cy = d.cylinder_index(&y) / 2;
        relations += 1;
        let (ra, rb) = (find(&mut parent, cx), find(&mut parent, cy));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut root_exit = vec![false; classes];
    let mut is_root = vec![false; classes];
    for (c, &exit) in has_exit.iter().enumerate() {
        let r = find(&mut parent, c);
        is_root[r] = true;
        root_exit[r] |= exit;
    }
    let free_rank = is_root.iter().filter(|&&r| r).count() as u64;
    let with_exit = (0..classes).filter(|&c| is_root[c] && root_exit[c]).count() as u64;
    Ok(DepthRankReport {
        depth,
        cylinders: count as u64,
        s_classes: classes as u64,
        relations,
        exit_cylinders: exits,
        free_rank,
        components_without_exit: free_rank - with_exit,
        components_with_exit: with_exit,
        note: "finite-depth approximation; not convergent, the torsion-free part stays unresolved".into(),
    })
}

/// `K₀` and `K₁` of the algebra of `h⁻¹`.
///
/// Oriented rules give `K₁ = ℤ` and `K₀` the stationary group of the occurrence matrix.
/// Otherwise `K₁ = 0` and `K₀ = ℤ/2 ⊕ (unresolved)`, with a depth report attached.
pub fn k_inverse(rule: &WrappingRule, ps: &PassageSystem, depth: usize) -> Result<KInverse, KTheoryError> {
    if rule.graph().vertices.len() != 1 {
        return Err(KTheoryError::Unsupported(
            "multi-vertex graphs need a reduction to a wedge of circles, which is not implemented".into(),
        ));
    }
    if &ps.base != rule {
        return Err(KTheoryError::Precondition("the passage system was built from a different rule".into()));
    }
    if depth == 0 {
        return Err(KTheoryError::Precondition("depth must be positive".into()));
    }
    if orientation_check(rule).oriented() {
        let a = occurrence_matrix(rule);
        return Ok(KInverse {
            oriented: true,
            k0: AbelianGroup::stationary(StationaryGroup::standard(a.clone())),
            k1: AbelianGroup::free(1),
            matrix: Some(a),
            depth_report: None,
        });
    }
    let report = depth_rank_report(ps, depth)?;
    let mut k0 = AbelianGroup::cyclic(BigInt::from(2));
    k0.unresolved.push(format!(
        "(1 + σ_*)C(Ω,ℤ) / (1 − φ_*)C(Ω,ℤ); depth-{} approximation has rank {}",
        report.depth, report.free_rank
    ));
    Ok(KInverse { oriented: false, k0, k1: AbelianGroup::zero(), matrix: None, depth_report: Some(report) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::building_blocks::{stabilize, StabilizeOptions};
    use crate::ktheory::smith::cokernel;
    use crate::presolenoid::corpus;

    fn run(rule: &WrappingRule, depth: usize) -> KInverse {
        let ps = stabilize(rule, &StabilizeOptions::default()).unwrap();
        k_inverse(rule, &ps, depth).unwrap()
    }

    #[test]
    fn w3_is_the_stationary_group_of_its_occurrence_matrix() {
        let k = run(&corpus::w3(), 1);
        assert!(k.k1.is_integers());
        assert_eq!(k.matrix.unwrap(), IntegerMatrix::from_rows(&[vec![65, 7], vec![24, 67]]));
    }

    #[test]
    fn w2_matrix() {
        let k = run(&corpus::w2(), 1);
        assert!(k.oriented && k.k1.is_integers());
        assert_eq!(k.matrix.unwrap(), IntegerMatrix::from_rows(&[vec![1, 1], vec![1, 1]]));
    }

    #[test]
    fn w4_has_a_two_torsion_summand_and_no_k1() {
        let k = run(&corpus::w4(), 3);
        assert!(k.k1.is_zero());
        assert_eq!(k.k0.torsion, vec![BigInt::from(2)]);
        assert_eq!(k.k0.unresolved.len(), 1);
        let r = k.depth_report.unwrap();
        assert_eq!(r.depth, 3);
        assert_eq!(r.s_classes * 2, r.cylinders);
        assert_eq!(r.relations + r.exit_cylinders, r.cylinders);
    }

    /// The union-find rank equals the rank of the cokernel of the relation matrix.
    #[test]
    fn depth_rank_matches_smith_cokernel() {
        let rule = corpus::w4();
        let ps = stabilize(&rule, &StabilizeOptions::default()).unwrap();
        let d = build_diagram(&ps).unwrap();
        for depth in 1..=2 {
            let r = depth_rank_report(&ps, depth).unwrap();
            let classes = r.s_classes as usize;
            let mut cols = Vec::new();
            for x in d.cylinders(depth).unwrap() {
                if d.is_exit(&x) {
                    continue;
                }
                let y = d.phi(&x).unwrap();
                let mut v = vec![BigInt::from(0); classes];
                v[d.cylinder_index(&x) / 2] += 1;
                v[d.cylinder_index(&y) / 2] -= 1;
                cols.push(v);
            }
            let c = cokernel(&IntegerMatrix::from_columns(classes, &cols));
            assert!(c.torsion.is_empty());
            assert_eq!(c.free_rank as u64, r.free_rank, "depth {depth}");
        }
    }

    #[test]
    fn multi_vertex_is_unsupported() {
        let text = "vertices: u w\nedge a: u -> u\nedge b: w -> w\nrule a = b b\nrule b = a a";
        let rule = crate::presolenoid::parse_solenoid_file(text).unwrap();
        let mut ps = stabilize(&corpus::w2(), &StabilizeOptions::default()).unwrap();
        ps.base = rule.clone();
        assert!(matches!(k_inverse(&rule, &ps, 1), Err(KTheoryError::Unsupported(_))));
    }
}
