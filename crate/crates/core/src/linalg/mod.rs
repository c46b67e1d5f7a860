//! Exact linear algebra over `F_q`: canonical subspaces, kernels,
//! annihilators, quotient maps, and subspace enumeration.

mod enumerate;
mod matrix;
mod subspace;

use num_bigint::BigUint;
use thiserror::Error;

pub use enumerate::{gaussian_binomial, subspace_count, SubspaceEnumerator};
pub use matrix::{Matrix, MatrixData, Rref};
pub use subspace::{quotient_map, quotient_section, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("operands live over different fields")]
    FieldMismatch,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("element code {code} is not below q = {q}")]
    InvalidElement { code: u32, q: u32 },
    #[error("basis is not in reduced row-echelon form")]
    NotCanonical,
    #[error("enumeration of {count} items exceeds the budget of {budget}")]
    BudgetExceeded { count: BigUint, budget: u128 },
}

impl Subspace {
    pub(crate) fn from_parts(basis: Matrix, pivots: Vec<usize>) -> Self {
        debug_assert_eq!(Subspace::span(&basis).basis(), &basis);
        Self::from_parts_unchecked(basis, pivots)
    }
}
