//! K-groups of the heteroclinic algebra from the passage matrices.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::groups::{AbelianGroup, StationaryGroup};
use super::matrix::IntegerMatrix;
use super::smith::{cokernel, kernel_basis, solve_integer};
use super::KTheoryError;
use crate::building_blocks::PassageSystem;
use crate::perron::PerronSummary;
use crate::presolenoid::orientation_check;

/// Checks that every nonzero column of `I − U` has exactly two entries, each `±1`.
fn check_difference_columns(d: &IntegerMatrix) -> Result<(), KTheoryError> {
    for j in 0..d.cols() {
        let col = d.column(j);
        let nonzero: Vec<&BigInt> = col.iter().filter(|x| !x.is_zero()).collect();
        if nonzero.is_empty() {
            continue;
        }
        if nonzero.len() != 2 || nonzero.iter().any(|x| !x.abs().is_one()) {
            return Err(KTheoryError::Consistency(format!("column {j} of I − U is {col:?}, expected two entries ±1")));
        }
    }
    Ok(())
}

/// `K₁ = coker(I − U)`, cross-checked against the orientation verdict of the input rule:
/// the result must be `ℤ` for oriented rules and `ℤ/2` otherwise.
pub fn k1_heteroclinic(ps: &PassageSystem) -> Result<AbelianGroup, KTheoryError> {
    let d = ps.i.sub(&ps.u);
    check_difference_columns(&d)?;
    let group = AbelianGroup::from_cokernel(cokernel(&d));
    let oriented = orientation_check(&ps.base).oriented();
    let agrees = if oriented { group.is_integers() } else { group.is_cyclic_of_order(2) };
    if !agrees {
        return Err(KTheoryError::Consistency(format!(
            "coker(I − U) = {} but the rule is {}oriented",
            group.describe(),
            if oriented { "" } else { "not " }
        )));
    }
    Ok(group)
}

#[derive(Clone, Debug, Serialize)]
pub struct K0Heteroclinic {
    /// `lim(ker(I − U), X + N·I)`.
    pub group: StationaryGroup,
    pub eventual_rank: usize,
    pub perron: Option<PerronSummary>,
    pub description: String,
}

/// `K₀` as the stationary limit of `ker(I − U)` under `X + N·I`.
pub fn k0_heteroclinic(ps: &PassageSystem) -> Result<K0Heteroclinic, KTheoryError> {
    let d = ps.i.sub(&ps.u);
    let basis = kernel_basis(&d);
    let step = ps.x.add(&ps.n.mul(&ps.i));
    let m = ps.passage_count();
    let k = basis.len();
    let matrix = if k == 0 {
        IntegerMatrix::zeros(0, 0)
    } else {
        let b = IntegerMatrix::from_columns(m, &basis);
        let mut cols = Vec::with_capacity(k);
        for v in &basis {
            let image = step.mul_vec(v);
            if !d.mul_vec(&image).iter().all(Zero::is_zero) {
                return Err(KTheoryError::Consistency("X + N·I does not preserve ker(I − U)".into()));
            }
            let coords = solve_integer(&b, &image)
                .ok_or_else(|| KTheoryError::Consistency("image is not in the kernel lattice".into()))?;
            cols.push(coords);
        }
        IntegerMatrix::from_columns(k, &cols)
    };
    let group = StationaryGroup { basis, matrix };
    Ok(K0Heteroclinic {
        eventual_rank: group.eventual_rank(),
        perron: group.perron(),
        description: group.describe(),
        group,
    })
}
