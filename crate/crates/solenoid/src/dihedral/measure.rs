//! The invariant probability measure on cylinders and its exact checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::diagram::OrderedBratteli;
use super::{serialize_u128, DihedralError};
use crate::perron::{perron, rat_pow, rat_string};
use crate::presolenoid::edge_cover_matrix;

const ENUMERATION_CAP: u128 = 4_000_000;

/// Mass of a depth-`k` cylinder on edge `c`: `w_c / (2·Σw·λ^k)` with `w` the right Perron
/// vector of the edge cover matrix; each sign gets half.
#[derive(Clone, Debug, Serialize)]
pub struct CylinderMeasure {
    pub lambda: String,
    /// Perron weights per edge (right eigenvector, largest entry 1).
    pub weights: Vec<String>,
    /// `2·Σw`.
    pub normalization: String,
    #[serde(skip)]
    lambda_exact: BigRational,
    #[serde(skip)]
    w: Vec<BigRational>,
    #[serde(skip)]
    norm: BigRational,
}

impl CylinderMeasure {
    pub fn mass_at(&self, edge: usize, depth: usize) -> BigRational {
        &self.w[edge] / (&self.norm * rat_pow(&self.lambda_exact, depth as u32))
    }

    pub fn mass(&self, x: &super::SigmaPoint) -> BigRational {
        self.mass_at(x.top, x.depth)
    }
}

/// The unique invariant measure, exact when the Perron value is an integer.
pub fn invariant_measure(d: &OrderedBratteli) -> Result<CylinderMeasure, DihedralError> {
    let h = edge_cover_matrix(&d.rule);
    let data = perron(&h, 64).map_err(|e| DihedralError::Precondition(e.to_string()))?;
    let lambda = data.lambda.exact.clone().ok_or_else(|| {
        DihedralError::Precondition("the Perron value is irrational; exact cylinder masses need an integral λ".into())
    })?;
    let w = data.right.clone();
    let sum: BigRational = w.iter().sum();
    let norm = sum * BigRational::from_integer(BigInt::from(2));
    Ok(CylinderMeasure {
        lambda: lambda.to_string(),
        weights: w.iter().map(rat_string).collect(),
        normalization: rat_string(&norm),
        lambda_exact: BigRational::from_integer(lambda),
        w,
        norm,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureReport {
    pub max_depth: usize,
    #[serde(serialize_with = "serialize_u128")]
    pub cylinders_checked: u128,
    pub total_mass_one: bool,
    pub additivity: bool,
    pub sign_invariance: bool,
    /// Interior cylinders map to cylinders of equal mass, injectively.
    pub phi_interior: bool,
    /// Exit cylinders map into the complement of the interior images, which has the same
    /// mass as the exit cylinders.
    pub phi_exits_by_complement: bool,
    pub failures: Vec<String>,
    pub pass: bool,
}

/// Exact checks on every cylinder of depth `0..=max_depth`: total mass, additivity over
/// one-step extensions, and invariance under `S` and `φ`.
pub fn check_measure(d: &OrderedBratteli, m: &CylinderMeasure, max_depth: usize) -> Result<MeasureReport, DihedralError> {
    let mut r = MeasureReport {
        max_depth,
        cylinders_checked: 0,
        total_mass_one: true,
        additivity: true,
        sign_invariance: true,
        phi_interior: true,
        phi_exits_by_complement: true,
        failures: Vec::new(),
        pass: false,
    };
    let n = d.edge_count();
    // Masses depend only on (depth, edge), so every check below compares integer counts
    // against a table of exact rationals.
    let weigh = |counts: &[u128], table: &[BigRational]| -> BigRational {
        counts.iter().zip(table).map(|(&c, m)| BigRational::from_integer(BigInt::from(c)) * m).sum()
    };
    for k in 0..=max_depth {
        let count = d.cylinder_count(k)?;
        if count > ENUMERATION_CAP {
            return Err(DihedralError::Depth(format!("{count} cylinders at depth {k} exceed the enumeration cap")));
        }
        d.len(k + 1, 0)?;
        r.cylinders_checked += count;
        let here: Vec<BigRational> = (0..n).map(|c| m.mass_at(c, k)).collect();
        let below: Vec<BigRational> = (0..n).map(|c| m.mass_at(c, k + 1)).collect();
        let mut per_edge = vec![0u128; n];
        let mut exit_edges = vec![0u128; n];
        let mut hit = vec![false; count as usize];
        let mut exits = Vec::new();
        // Extension counts already shown to add up, per top edge.
        let mut good_extensions: Vec<Option<Vec<u128>>> = vec![None; n];
        for x in d.cylinders(k)? {
            per_edge[x.top] += 1;
            // Additivity: the depth-(k+1) cylinders projecting onto x, counted by top edge.
            let mut ext = vec![0u128; n];
            for (outer, slot) in ext.iter_mut().enumerate() {
                let mut start = 0u128;
                for l in d.rule.word(outer) {
                    let len = d.lengths[k][l.edge];
                    if l.edge == x.top {
                        let inner = if l.sign < 0 { len - 1 - x.position } else { x.position };
                        let y = d.point(x.sign, outer, k + 1, start + inner)?;
                        if d.project(&y, k) != x {
                            r.additivity = false;
                            r.failures.push(format!("extension {y:?} does not project to {x:?}"));
                        }
                        *slot += 1;
                    }
                    start += len;
                }
            }
            if good_extensions[x.top].as_ref() != Some(&ext) {
                let total = weigh(&ext, &below);
                if total == here[x.top] {
                    good_extensions[x.top] = Some(ext);
                } else {
                    r.additivity = false;
                    r.failures.push(format!("extensions of {x:?} carry {total}, not {}", here[x.top]));
                }
            }
            let sx = d.s(&x);
            if sx.top != x.top || sx.depth != x.depth {
                r.sign_invariance = false;
                r.failures.push(format!("S moves {x:?} to another edge or depth"));
            }
            if d.is_exit(&x) {
                exit_edges[x.top] += 1;
                exits.push(x);
            } else {
                let y = d.phi(&x)?;
                let idx = d.cylinder_index(&y);
                if hit[idx] || y.depth != k || here[y.top] != here[x.top] {
                    r.phi_interior = false;
                    r.failures.push(format!("φ of {x:?} is not a mass-preserving injection"));
                }
                hit[idx] = true;
            }
        }
        let total = weigh(&per_edge, &here);
        if total != BigRational::one() {
            r.total_mass_one = false;
            r.failures.push(format!("total mass at depth {k} is {total}"));
        }
        let mut missed = vec![0u128; n];
        for y in d.cylinders(k)? {
            if !hit[d.cylinder_index(&y)] {
                missed[y.top] += 1;
            }
        }
        let exits_land_outside = exits.iter().try_fold(true, |ok, x| {
            Ok::<bool, DihedralError>(ok && d.phi_images(x)?.iter().all(|y| !hit[d.cylinder_index(y)]))
        })?;
        if weigh(&missed, &here) != weigh(&exit_edges, &here) || !exits_land_outside {
            r.phi_exits_by_complement = false;
            r.failures.push(format!("exit images at depth {k} do not fill the complement"));
        }
    }
    r.pass = r.failures.is_empty();
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::super::diagram::tests::diagram_of;
    use super::*;
    use crate::presolenoid::corpus;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn dyadic_masses() {
        let d = diagram_of(&corpus::dyadic());
        let m = invariant_measure(&d).unwrap();
        assert_eq!(m.mass_at(0, 0), rat(1, 2));
        for k in 0..6 {
            assert_eq!(m.mass_at(0, k), rat(1, 1 << (k + 1)));
        }
    }

    #[test]
    fn w4_checks_to_depth_five() {
        let d = diagram_of(&corpus::w4());
        let m = invariant_measure(&d).unwrap();
        assert_eq!(m.lambda, "9");
        let r = check_measure(&d, &m, 5).unwrap();
        assert!(r.pass, "{:?}", r.failures);
    }

    #[test]
    fn w2_and_w3_measures() {
        let d = diagram_of(&corpus::w2());
        let r = check_measure(&d, &invariant_measure(&d).unwrap(), 4).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        let d = diagram_of(&corpus::w3());
        let m = invariant_measure(&d).unwrap();
        // W3 only stabilizes at its square, so the diagram's Perron value is 79².
        assert_eq!(m.lambda, "6241");
        let r = check_measure(&d, &m, 0).unwrap();
        assert!(r.pass, "{:?}", r.failures);
    }
}
