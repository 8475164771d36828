use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::ser_rational;
use crate::linalg::{minor, IndexSet, RationalMatrix};
use crate::sign::Sign;

/// `det(Ã[I, J]) * det(B[J, I])` for one pair of index sets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorProduct {
    #[serde(rename = "I")]
    pub rows: IndexSet,
    #[serde(rename = "J")]
    pub cols: IndexSet,
    #[serde(serialize_with = "ser_rational")]
    pub product: Rational,
}

/// Outcome of the paired-minor sign test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorsReport {
    pub holds: bool,
    pub size: usize,
    /// The common sign of the nonzero products, when `holds`.
    pub sign: Option<Sign>,
    /// Every nonzero product, ordered by `(I, J)`.
    pub nonzero_products: Vec<MinorProduct>,
    /// On failure with mixed signs: the first positive and the first
    /// negative product in `(I, J)` order.
    pub conflict: Option<(MinorProduct, MinorProduct)>,
}

/// Checks that all nonzero products `det(Ã[I, J]) det(B[J, I])` over
/// `s`-subsets share one sign and at least one is nonzero.
pub fn check_minors(atilde: &RationalMatrix, b: &RationalMatrix, s: usize) -> Result<MinorsReport> {
    let (n, r) = (atilde.rows(), atilde.cols());
    if b.rows() != r || b.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "Ã is {n}x{r} but B is {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    if s > n.min(r) {
        return Err(Error::SizeMismatch(format!("s = {s} exceeds min(n, r) = {}", n.min(r))));
    }
    let row_sets: Vec<IndexSet> = IndexSet::combinations(n, s).collect();
    let col_sets: Vec<IndexSet> = IndexSet::combinations(r, s).collect();
    let b_minors: Vec<Vec<Rational>> = col_sets
        .par_iter()
        .map(|j| row_sets.iter().map(|i| minor(b, j, i).expect("sizes")).collect())
        .collect();

    let per_row: Vec<Vec<MinorProduct>> = row_sets
        .par_iter()
        .enumerate()
        .map(|(ii, i)| {
            col_sets
                .iter()
                .enumerate()
                .filter_map(|(jj, j)| {
                    let db = &b_minors[jj][ii];
                    if db.cmp0().is_eq() {
                        return None;
                    }
                    let da = minor(atilde, i, j).expect("sizes");
                    if da.cmp0().is_eq() {
                        return None;
                    }
                    Some(MinorProduct { rows: i.clone(), cols: j.clone(), product: da * db })
                })
                .collect()
        })
        .collect();
    let nonzero_products: Vec<MinorProduct> = per_row.into_iter().flatten().collect();

    let first_with = |sg: Sign| {
        nonzero_products
            .iter()
            .find(|p| Sign::of(&p.product) == sg)
            .cloned()
    };
    let (pos, neg) = (first_with(Sign::Plus), first_with(Sign::Minus));
    let (holds, sign, conflict) = match (pos, neg) {
        (Some(p), Some(q)) => (false, None, Some((p, q))),
        (Some(_), None) => (true, Some(Sign::Plus), None),
        (None, Some(_)) => (true, Some(Sign::Minus), None),
        (None, None) => (false, None, None),
    };
    Ok(MinorsReport { holds, size: s, sign, nonzero_products, conflict })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn products(r: &MinorsReport) -> Vec<i64> {
        r.nonzero_products.iter().map(|p| p.product.numer().to_i64().unwrap()).collect()
    }

    #[test]
    fn examples() {
        let a = RationalMatrix::from_ints(&[[1, -1]]);
        let b = RationalMatrix::from_ints(&[[0], [1]]);
        let rep = check_minors(&a, &b, 1).unwrap();
        assert!(rep.holds);
        assert_eq!(products(&rep), vec![-1]);

        let b = RationalMatrix::from_ints(&[[2], [1]]);
        let rep = check_minors(&a, &b, 1).unwrap();
        assert!(!rep.holds);
        let (p, q) = rep.conflict.unwrap();
        assert_eq!((p.cols.one_based(), q.cols.one_based()), (vec![1], vec![2]));

        let a = RationalMatrix::from_ints(&[[1, -1, 1]]);
        let b = RationalMatrix::from_ints(&[[1], [2], [5]]);
        let rep = check_minors(&a, &b, 1).unwrap();
        assert_eq!(products(&rep), vec![1, -2, 5]);
        assert!(!rep.holds);
    }

    #[test]
    fn all_zero_products_fail() {
        let a = RationalMatrix::from_ints(&[[1, 0]]);
        let b = RationalMatrix::from_ints(&[[0], [1]]);
        let rep = check_minors(&a, &b, 1).unwrap();
        assert!(!rep.holds && rep.conflict.is_none());
    }
}
