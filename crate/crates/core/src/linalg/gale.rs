use rug::Rational;

use super::elimination::{kernel_basis, minor, permutation_sign_tau, primitive_integer_vector, rank, rref};
use super::matrix::{IndexSet, RationalMatrix};
use crate::error::{Error, Result};
use crate::sign::Sign;

/// For a full-rank `n x s` matrix `C` with `0 < s < n`, returns a full-rank
/// `(n-s) x n` matrix `Z` with `im(C) = ker(Z)`.
///
/// Rows come from the reduced row-echelon form of the left kernel of `C`,
/// cleared to primitive integer rows (leading entries positive).
pub fn gale_dual(c: &RationalMatrix) -> Result<RationalMatrix> {
    let (n, s) = (c.rows(), c.cols());
    let rk = rank(c);
    if rk < s {
        return Err(Error::RankDeficient { rank: rk, expected: s });
    }
    if s == n {
        return Err(Error::NoComplement);
    }
    if s == 0 {
        return Err(Error::Invalid("gale_dual needs at least one column".into()));
    }
    let left_kernel = kernel_basis(&c.transpose()).transpose();
    let (reduced, pivots) = rref(&left_kernel);
    let rows: Vec<Vec<Rational>> = (0..pivots.len())
        .map(|i| primitive_integer_vector(reduced.row(i)))
        .collect();
    let z = RationalMatrix::from_rows(rows)?;

    if z.rows() != n - s || rank(&z) != n - s || !z.mul(c)?.is_zero() {
        return Err(Error::Internal("left kernel does not present im(C)".into()));
    }
    Ok(z)
}

/// Finds the nonzero constant `delta` with
/// `delta * det(C[I, :]) = tau(I) * det(Z[:, I^c])` for every `s`-subset `I`.
pub fn verify_gale_relation(c: &RationalMatrix, z: &RationalMatrix) -> Result<Rational> {
    let (n, s) = (c.rows(), c.cols());
    if z.cols() != n || z.rows() + s != n {
        return Err(Error::ShapeMismatch(format!(
            "C is {n}x{s} but Z is {}x{}",
            z.rows(),
            z.cols()
        )));
    }
    let all_c = IndexSet::full(s);
    let all_z = IndexSet::full(n - s);
    let mut delta: Option<Rational> = None;
    for i in IndexSet::combinations(n, s) {
        let lhs = minor(c, &i, &all_c)?;
        let mut rhs = minor(z, &all_z, &i.complement())?;
        if permutation_sign_tau(&i) == Sign::Minus {
            rhs = -rhs;
        }
        match (lhs.cmp0().is_eq(), rhs.cmp0().is_eq()) {
            (true, true) => continue,
            (true, false) | (false, true) => {
                return Err(Error::NotGaleDual(format!(
                    "minor pair for I = {i} has mismatched zero pattern"
                )))
            }
            (false, false) => {}
        }
        let ratio = rhs / lhs;
        match &delta {
            None => delta = Some(ratio),
            Some(d) if *d == ratio => {}
            Some(d) => {
                return Err(Error::NotGaleDual(format!(
                    "ratio {ratio} at I = {i} differs from {d}"
                )))
            }
        }
    }
    delta.ok_or_else(|| Error::NotGaleDual("all maximal minors vanish".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_of_column_vectors() {
        let c = RationalMatrix::from_ints(&[[1], [-1]]);
        let z = gale_dual(&c).unwrap();
        assert_eq!(z, RationalMatrix::from_ints(&[[1, 1]]));

        let c = RationalMatrix::from_ints(&[[1], [1], [1]]);
        let z = gale_dual(&c).unwrap();
        assert_eq!(z, RationalMatrix::from_ints(&[[1, 0, -1], [0, 1, -1]]));
        assert!(z.mul(&c).unwrap().is_zero());
    }

    #[test]
    fn dual_of_identity_split() {
        let c = RationalMatrix::identity(4).select_cols(&[0, 1]);
        let z = gale_dual(&c).unwrap();
        assert_eq!(z, RationalMatrix::identity(4).select_rows(&[2, 3]));
        let d = verify_gale_relation(&c, &z).unwrap();
        assert!(d == 1 || d == -1);
    }

    #[test]
    fn dual_errors() {
        let c = RationalMatrix::from_ints(&[[1, 2], [2, 4], [0, 0]]);
        assert!(matches!(gale_dual(&c), Err(Error::RankDeficient { rank: 1, expected: 2 })));
        assert_eq!(gale_dual(&RationalMatrix::identity(2)), Err(Error::NoComplement));
    }

    #[test]
    fn relation_for_unit_vector() {
        let c = RationalMatrix::from_ints(&[[1], [0], [0]]);
        let z = RationalMatrix::from_ints(&[[0, 1, 0], [0, 0, 1]]);
        assert_eq!(verify_gale_relation(&c, &z).unwrap(), 1);

        let z5 = RationalMatrix::from_ints(&[[0, 5, 0], [0, 0, 1]]);
        assert_eq!(verify_gale_relation(&c, &z5).unwrap(), 5);
    }

    #[test]
    fn relation_rejects_non_dual() {
        let c = RationalMatrix::from_ints(&[[1], [1], [0]]);
        let z = RationalMatrix::from_ints(&[[0, 1, 0], [0, 0, 1]]);
        assert!(matches!(verify_gale_relation(&c, &z), Err(Error::NotGaleDual(_))));
    }
}
