//! The parity obstruction behind the `ℤ/2` summand: no integer cylinder function `h`
//! satisfies `h + h∘S = 1 = h + h∘(φ∘S)`.

use std::collections::VecDeque;

use serde::Serialize;

use super::KTheoryError;
use crate::dihedral::{minimality_check, DihedralError, MinimalityVerdict, OrderedBratteli, SigmaPoint};

const ENUMERATION_CAP: u128 = 4_000_000;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Z2Outcome {
    /// Some component of the constraint graph has an odd cycle, forcing `2h = rhs`.
    Unsat { odd_cycle_edge: (SigmaPoint, SigmaPoint), odd_components: usize },
    /// Values of `h` on the depth-`depth` cylinders, in cylinder-index order.
    Witness { values: Vec<i64> },
}

#[derive(Clone, Debug, Serialize)]
pub struct Z2Report {
    pub depth: usize,
    pub rhs: i64,
    pub cylinders: u64,
    /// Constraints `h(x) + h(y) = rhs`, from `S` and from the refined images of `φ∘S`.
    pub constraints: u64,
    pub components: usize,
    pub outcome: Z2Outcome,
}

impl Z2Report {
    pub fn is_unsat(&self) -> bool {
        matches!(self.outcome, Z2Outcome::Unsat { .. })
    }
}

fn dihedral_err(e: DihedralError) -> KTheoryError {
    KTheoryError::Precondition(e.to_string())
}

type Constraints = (Vec<SigmaPoint>, Vec<(usize, usize)>);

/// Every pair `(x, y)` of depth-`depth` cylinders with `y` meeting `S(x)` or `φ(S(x))`,
/// as dense cylinder indices.
pub(crate) fn constraint_edges(d: &OrderedBratteli, depth: usize) -> Result<Constraints, KTheoryError> {
    let count = d.cylinder_count(depth).map_err(dihedral_err)?;
    if count > ENUMERATION_CAP {
        return Err(KTheoryError::Precondition(format!("{count} cylinders at depth {depth} exceed the enumeration cap")));
    }
    let all: Vec<SigmaPoint> = d.cylinders(depth).map_err(dihedral_err)?.collect();
    let mut edges = Vec::new();
    for x in &all {
        let i = d.cylinder_index(x);
        let sx = d.s(x);
        edges.push((i, d.cylinder_index(&sx)));
        for y in d.phi_images(&sx).map_err(dihedral_err)? {
            edges.push((i, d.cylinder_index(&y)));
        }
    }
    Ok((all, edges))
}

/// Decides `h + h∘S = rhs = h + h∘(φ∘S)` over integer functions of depth-`depth` cylinders.
///
/// Each constraint reads `h(x) + h(y) = rhs`. Along a path values alternate between `t` and
/// `rhs − t`, so a bipartite component is solvable for any `rhs`, while an odd cycle (a
/// self-loop included) forces `2t = rhs`. A returned witness is checked on every constraint.
pub fn solve_parity_system(d: &OrderedBratteli, depth: usize, rhs: i64) -> Result<Z2Report, KTheoryError> {
    if depth == 0 {
        return Err(KTheoryError::Precondition("depth must be at least 1; whole edges do not close the φ∘S action".into()));
    }
    let (all, edges) = constraint_edges(d, depth)?;
    let n = all.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut colour: Vec<Option<u8>> = vec![None; n];
    let mut component = vec![0usize; n];
    let mut odd: Vec<bool> = Vec::new();
    let mut odd_edge = None;
    for root in 0..n {
        if colour[root].is_some() {
            continue;
        }
        let id = odd.len();
        odd.push(false);
        colour[root] = Some(0);
        component[root] = id;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let cu = colour[u].unwrap();
            for &v in &adj[u] {
                match colour[v] {
                    None => {
                        colour[v] = Some(1 - cu);
                        component[v] = id;
                        queue.push_back(v);
                    }
                    Some(cv) if cv == cu => {
                        odd[id] = true;
                        odd_edge.get_or_insert((u, v));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let odd_components = odd.iter().filter(|&&o| o).count();
    let outcome = if odd_components > 0 && rhs % 2 != 0 {
        let (u, v) = odd_edge.unwrap();
        Z2Outcome::Unsat { odd_cycle_edge: (all[u], all[v]), odd_components }
    } else {
        let values: Vec<i64> = (0..n)
            .map(|i| {
                if rhs % 2 == 0 {
                    rhs / 2
                } else if colour[i] == Some(0) {
                    0
                } else {
                    rhs
                }
            })
            .collect();
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| values[a] + values[b] != rhs) {
            return Err(KTheoryError::Consistency(format!("witness violates the constraint between cylinders {a} and {b}")));
        }
        Z2Outcome::Witness { values }
    };
    Ok(Z2Report { depth, rhs, cylinders: n as u64, constraints: edges.len() as u64, components: odd.len(), outcome })
}

/// The obstruction check proper: requires `φ` to be minimal, then solves with `rhs = 1`.
pub fn verify_z2_obstruction(d: &OrderedBratteli, depth: usize) -> Result<Z2Report, KTheoryError> {
    verify_z2_with_rhs(d, depth, 1)
}

pub fn verify_z2_with_rhs(d: &OrderedBratteli, depth: usize, rhs: i64) -> Result<Z2Report, KTheoryError> {
    let m = minimality_check(d, depth.max(1)).map_err(dihedral_err)?;
    if m.verdict != MinimalityVerdict::PhiMinimal {
        return Err(KTheoryError::Precondition(format!(
            "φ is not minimal: an invariant clopen set was found at depth {}",
            m.depth
        )));
    }
    solve_parity_system(d, depth, rhs)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;

    use super::*;
    use crate::building_blocks::{stabilize, StabilizeOptions};
    use crate::dihedral::build_diagram;
    use crate::ktheory::matrix::IntegerMatrix;
    use crate::ktheory::smith::solve_integer;
    use crate::presolenoid::{corpus, WrappingRule};

    fn diagram(rule: &WrappingRule) -> OrderedBratteli {
        build_diagram(&stabilize(rule, &StabilizeOptions::default()).unwrap()).unwrap()
    }

    #[test]
    fn w4_is_unsat_at_depth_three() {
        let r = verify_z2_obstruction(&diagram(&corpus::w4()), 3).unwrap();
        assert!(r.is_unsat(), "{:?}", r.components);
    }

    #[test]
    fn even_rhs_has_the_constant_witness() {
        let r = verify_z2_with_rhs(&diagram(&corpus::w4()), 3, 2).unwrap();
        match r.outcome {
            Z2Outcome::Witness { values } => assert!(values.iter().all(|&v| v == 1)),
            other => panic!("expected a witness, got {other:?}"),
        }
    }

    #[test]
    fn oriented_rule_fails_the_precondition() {
        assert!(matches!(verify_z2_obstruction(&diagram(&corpus::w2()), 2), Err(KTheoryError::Precondition(_))));
    }

    #[test]
    fn depth_zero_is_rejected() {
        assert!(matches!(verify_z2_obstruction(&diagram(&corpus::w4()), 0), Err(KTheoryError::Precondition(_))));
    }

    /// The graph argument agrees with a direct integer solve of the same linear system.
    #[test]
    fn agrees_with_integer_linear_algebra() {
        for (rule, depth) in [(corpus::w4(), 1), (corpus::w4(), 2), (corpus::w2(), 1), (corpus::dyadic(), 2)] {
            let d = diagram(&rule);
            let (all, edges) = constraint_edges(&d, depth).unwrap();
            let n = all.len();
            let mut a = IntegerMatrix::zeros(edges.len(), n);
            for (row, &(u, v)) in edges.iter().enumerate() {
                *a.entry_mut(row, u) += 1;
                *a.entry_mut(row, v) += 1;
            }
            for rhs in [1i64, 2, 3] {
                let v = vec![BigInt::from(rhs); edges.len()];
                let direct = solve_integer(&a, &v).is_some();
                let graph = !solve_parity_system(&d, depth, rhs).unwrap().is_unsat();
                assert_eq!(direct, graph, "depth {depth}, rhs {rhs}");
            }
        }
    }
}
