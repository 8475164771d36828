//! Exact rational linear algebra.
//!
//! Everything that feeds a verdict goes through here: ranks and minors via
//! fraction-free (Bareiss) elimination, kernels via reduced row-echelon
//! form, and Gale duals with their maximal-minor relation.

mod elimination;
mod gale;
mod matrix;

pub use elimination::{
    column_basis, determinant, kernel_basis, minor, permutation_sign_tau,
    primitive_integer_vector, rank, row_basis, rref,
};
pub use gale::{gale_dual, verify_gale_relation};
pub use matrix::{Combinations, IndexSet, RationalMatrix};

pub type Rational = rug::Rational;
