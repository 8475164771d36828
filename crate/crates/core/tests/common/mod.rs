#![allow(dead_code)]

use proptest::prelude::*;
use signject::{Rational, RationalMatrix};

pub fn int_matrix(rows: usize, cols: usize, bound: i64) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec(-bound..=bound, rows * cols).prop_map(move |e| {
        let entries = e.into_iter().map(Rational::from).collect();
        RationalMatrix::new(rows, cols, entries).unwrap()
    })
}

/// Entries `p/q` with small numerator and denominator.
pub fn rational_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec((-6i64..=6, 1i64..=4), rows * cols).prop_map(move |e| {
        let entries = e.into_iter().map(|(p, q)| Rational::from((p, q))).collect();
        RationalMatrix::new(rows, cols, entries).unwrap()
    })
}

pub fn sized_int_matrix(max_rows: usize, max_cols: usize, bound: i64) -> impl Strategy<Value = RationalMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(move |(r, c)| int_matrix(r, c, bound))
}

pub fn q(v: i64) -> Rational {
    Rational::from(v)
}

pub fn is_zero(v: &[Rational]) -> bool {
    v.iter().all(|x| x.cmp0().is_eq())
}
