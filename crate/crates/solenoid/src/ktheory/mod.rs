//! Exact integer linear algebra and K-theoretic invariants.

pub mod compare;
pub mod groups;
pub mod heteroclinic;
pub mod inverse;
pub mod kunneth;
pub mod matrix;
pub mod smith;
pub mod z2;

pub use compare::{stationary_compare_2x2, Comparison, Verdict};
pub use groups::{AbelianGroup, StationaryGroup};
pub use heteroclinic::{k0_heteroclinic, k1_heteroclinic, K0Heteroclinic};
pub use inverse::{depth_rank_report, k_inverse, occurrence_matrix, DepthRankReport, KInverse};
pub use kunneth::{kunneth, tensor, tor, KPair};
pub use matrix::IntegerMatrix;
pub use smith::{cokernel, kernel_basis, smith_normal_form, solve_integer, Cokernel, SmithForm};
pub use z2::{solve_parity_system, verify_z2_obstruction, verify_z2_with_rhs, Z2Outcome, Z2Report};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum KTheoryError {
    #[error("internal inconsistency: {0}")]
    Consistency(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
}
