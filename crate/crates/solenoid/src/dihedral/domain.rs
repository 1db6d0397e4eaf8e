//! Clopen fundamental domains of the involutions `S` and `φ∘S`.

use std::collections::VecDeque;

use serde::Serialize;

use super::action::SigmaPoint;
use super::diagram::OrderedBratteli;
use super::{serialize_u128, DihedralError};

const ENUMERATION_CAP: u128 = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Involution {
    S,
    PhiS,
}

#[derive(Clone, Debug, Serialize)]
pub struct FundamentalDomain {
    pub involution: Involution,
    pub depth: usize,
    #[serde(serialize_with = "serialize_u128")]
    pub cylinders: u128,
    #[serde(serialize_with = "serialize_u128")]
    pub in_domain: u128,
    pub description: String,
    /// `K ∩ inv(K) = ∅` and `inv(Kᶜ) ⊆ K`, checked on every cylinder.
    pub verified: bool,
    #[serde(skip)]
    member: Vec<bool>,
}

impl FundamentalDomain {
    pub fn contains(&self, d: &OrderedBratteli, x: &SigmaPoint) -> bool {
        assert_eq!(x.depth, self.depth, "cylinder of another depth");
        self.member[d.cylinder_index(x)]
    }
}

fn images(d: &OrderedBratteli, inv: Involution, x: &SigmaPoint) -> Result<Vec<SigmaPoint>, DihedralError> {
    match inv {
        Involution::S => Ok(vec![d.s(x)]),
        Involution::PhiS => d.phi_images(&d.s(x)),
    }
}

/// A union `K` of depth-`depth` cylinders with `K ∩ inv(K) = ∅` and `K ∪ inv(K) = Ω`.
///
/// For `S` this is `{sign = +}`. For `φ∘S`, cylinders are taken greedily in order, each
/// choice forcing its images out of `K` and theirs back in; a cylinder meeting its own
/// image means the depth must be increased.
pub fn fundamental_domain(d: &OrderedBratteli, inv: Involution, depth: usize) -> Result<FundamentalDomain, DihedralError> {
    let count = d.cylinder_count(depth)?;
    if count > ENUMERATION_CAP {
        return Err(DihedralError::Depth(format!("{count} cylinders exceed the enumeration cap")));
    }
    let all: Vec<SigmaPoint> = d.cylinders(depth)?.collect();
    let mut member: Vec<Option<bool>> = vec![None; all.len()];
    match inv {
        Involution::S => {
            for x in &all {
                member[d.cylinder_index(x)] = Some(x.sign > 0);
            }
        }
        Involution::PhiS => {
            if depth == 0 {
                return Err(DihedralError::Refinement {
                    depth,
                    reason: "every depth-0 cylinder is a whole edge and leaves it under φ∘S".into(),
                });
            }
            for x in &all {
                if member[d.cylinder_index(x)].is_some() {
                    continue;
                }
                member[d.cylinder_index(x)] = Some(true);
                let mut queue = VecDeque::from([*x]);
                while let Some(u) = queue.pop_front() {
                    let side = member[d.cylinder_index(&u)].unwrap();
                    for v in images(d, inv, &u)? {
                        let slot = &mut member[d.cylinder_index(&v)];
                        match *slot {
                            None => {
                                *slot = Some(!side);
                                queue.push_back(v);
                            }
                            Some(s) if s == side => {
                                return Err(DihedralError::Refinement {
                                    depth,
                                    reason: format!("cylinder {u:?} meets its own image class"),
                                });
                            }
                            Some(_) => {}
                        }
                    }
                }
            }
        }
    }
    let member: Vec<bool> = member.into_iter().map(|m| m.unwrap_or(false)).collect();
    let mut verified = true;
    for x in &all {
        let inside = member[d.cylinder_index(x)];
        for y in images(d, inv, x)? {
            if member[d.cylinder_index(&y)] == inside {
                verified = false;
            }
        }
    }
    let in_domain = member.iter().filter(|&&m| m).count() as u128;
    let description = match inv {
        Involution::S => "K = {sign = +}".to_string(),
        Involution::PhiS => format!("greedy union of {in_domain} of the {count} depth-{depth} cylinders"),
    };
    Ok(FundamentalDomain { involution: inv, depth, cylinders: count, in_domain, description, verified, member })
}

#[cfg(test)]
mod tests {
    use super::super::diagram::tests::diagram_of;
    use super::*;
    use crate::presolenoid::corpus;

    #[test]
    fn sign_half_is_a_domain_for_s() {
        let d = diagram_of(&corpus::w4());
        let k = fundamental_domain(&d, Involution::S, 3).unwrap();
        assert!(k.verified);
        assert_eq!(k.in_domain * 2, k.cylinders);
        let x = d.point(1, 0, 3, 5).unwrap();
        assert!(k.contains(&d, &x));
        assert!(!k.contains(&d, &d.s(&x)));
    }

    #[test]
    fn phi_s_domain_on_w4() {
        let d = diagram_of(&corpus::w4());
        let k = fundamental_domain(&d, Involution::PhiS, 5).unwrap();
        assert!(k.verified);
        assert_eq!(k.in_domain * 2, k.cylinders);
    }

    #[test]
    fn depth_zero_needs_refinement() {
        let d = diagram_of(&corpus::w4());
        assert!(matches!(fundamental_domain(&d, Involution::PhiS, 0), Err(DihedralError::Refinement { .. })));
    }
}
