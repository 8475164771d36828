//! Exact decision procedures for injectivity of generalized polynomial maps
//! `f_k(x) = A diag(k) x^B` over all positive parameters, via sign vectors
//! and oriented matroids.

pub mod crn;
pub mod descartes;
pub mod error;
pub mod feasibility;
pub mod injectivity;
pub mod io;
pub mod linalg;
pub mod matroid;
pub mod numeric;
pub mod oracle;
pub mod sign;

pub use error::{Error, Result};
pub use linalg::{IndexSet, Rational, RationalMatrix};
pub use sign::{Sign, SignVector, SignVectorSet};
