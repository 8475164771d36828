//! Oriented matroids of vector configurations: chirotopes, cocircuits,
//! covectors `σ(im Aᵀ)` and vectors `σ(ker A)`.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{determinant, kernel_basis, rank, row_basis, IndexSet, Rational, RationalMatrix};
use crate::sign::{compose, Sign, SignVector, SignVectorSet};

/// Signs of the maximal minors `det(A[:, J])` of an `n x r` matrix of rank
/// `n`, for every sorted `n`-subset `J` of the columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chirotope {
    rank: usize,
    ground: usize,
    entries: Vec<(IndexSet, Sign)>,
}

impl Chirotope {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn entries(&self) -> &[(IndexSet, Sign)] {
        &self.entries
    }

    pub fn get(&self, j: &IndexSet) -> Option<Sign> {
        self.entries
            .binary_search_by(|(k, _)| k.as_slice().cmp(j.as_slice()))
            .ok()
            .map(|p| self.entries[p].1)
    }

    pub fn negated(&self) -> Chirotope {
        Chirotope {
            rank: self.rank,
            ground: self.ground,
            entries: self.entries.iter().map(|(j, s)| (j.clone(), -*s)).collect(),
        }
    }
}

impl Serialize for Chirotope {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for (j, sign) in &self.entries {
            let key: String = j.one_based().iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",");
            map.serialize_entry(&key, sign)?;
        }
        map.end()
    }
}

/// A set of sign vectors that is the covector set of some configuration:
/// contains zero and is closed under negation and composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CovectorSet(SignVectorSet);

impl CovectorSet {
    pub fn as_set(&self) -> &SignVectorSet {
        &self.0
    }

    pub fn into_set(self) -> SignVectorSet {
        self.0
    }

    pub fn contains(&self, v: &SignVector) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks the closure invariants directly. Quadratic in the set size.
    pub fn is_closed(&self) -> bool {
        let set = &self.0;
        let n = set.ground_len();
        if !set.contains(&SignVector::zero(n)) {
            return false;
        }
        set.iter().all(|u| {
            set.contains(&u.negated())
                && set
                    .iter()
                    .all(|v| set.contains(&compose(u, v).expect("same length")))
        })
    }
}

impl Serialize for CovectorSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

fn require_full_row_rank(a: &RationalMatrix) -> Result<()> {
    let rk = rank(a);
    if rk < a.rows() {
        return Err(Error::RankDeficient { rank: rk, expected: a.rows() });
    }
    Ok(())
}

pub fn chirotope(a: &RationalMatrix) -> Result<Chirotope> {
    require_full_row_rank(a)?;
    let (n, r) = (a.rows(), a.cols());
    let rows: Vec<usize> = (0..n).collect();
    let subsets: Vec<IndexSet> = IndexSet::combinations(r, n).collect();
    let entries = subsets
        .into_par_iter()
        .map(|j| {
            let d = determinant(&a.select(&rows, j.as_slice())).expect("square");
            (j, Sign::of(&d))
        })
        .collect();
    Ok(Chirotope { rank: n, ground: r, entries })
}

/// Normal vector of the span of `n - 1` columns by cofactor expansion, so
/// that `t · a^j = det(a^{h_1}, ..., a^{h_{n-1}}, a^j)`. Zero iff the
/// columns are dependent.
fn cofactor_normal(a: &RationalMatrix, h: &IndexSet) -> Vec<Rational> {
    let n = a.rows();
    (0..n)
        .map(|i| {
            let others: Vec<usize> = (0..n).filter(|&k| k != i).collect();
            let d = determinant(&a.select(&others, h.as_slice())).expect("square");
            if (i + n - 1).is_multiple_of(2) {
                d
            } else {
                -d
            }
        })
        .collect()
}

fn cocircuits_unchecked(a: &RationalMatrix) -> SignVectorSet {
    let (n, r) = (a.rows(), a.cols());
    let at = a.transpose();
    let hyperplanes: Vec<IndexSet> = IndexSet::combinations(r, n - 1).collect();
    let found: Vec<SignVector> = hyperplanes
        .par_iter()
        .filter_map(|h| {
            let t = cofactor_normal(a, h);
            if t.iter().all(|q| q.cmp0().is_eq()) {
                return None;
            }
            let c = at.mul_vec(&t).expect("shape");
            Some(SignVector::new(c.iter().map(Sign::of).collect()).expect("r >= 1"))
        })
        .collect();
    let mut out = SignVectorSet::new(r);
    for c in found {
        let neg = c.negated();
        out.insert(c).expect("length r");
        out.insert(neg).expect("length r");
    }
    out
}

/// Cocircuits (nonzero covectors of minimal support) of an `n x r` matrix
/// of rank `n`, both orientations, canonically ordered.
pub fn cocircuits(a: &RationalMatrix) -> Result<SignVectorSet> {
    require_full_row_rank(a)?;
    if a.cols() == 0 {
        return Err(Error::Invalid("configuration has no vectors".into()));
    }
    if a.rows() == 0 {
        return Ok(SignVectorSet::new(a.cols()));
    }
    Ok(cocircuits_unchecked(a))
}

/// Closure of `{0} ∪ generators` under composition with generators.
fn composition_closure(r: usize, generators: &SignVectorSet) -> SignVectorSet {
    let zero = SignVector::zero(r);
    let mut out = SignVectorSet::new(r);
    out.insert(zero.clone()).expect("length r");
    let mut queue = VecDeque::from([zero]);
    while let Some(x) = queue.pop_front() {
        for c in generators {
            let y = compose(&x, c).expect("length r");
            if out.insert(y.clone()).expect("length r") {
                queue.push_back(y);
            }
        }
    }
    out
}

/// `σ(im Aᵀ)` for an `n x r` matrix of rank `n`.
pub fn covectors(a: &RationalMatrix) -> Result<CovectorSet> {
    let co = cocircuits(a)?;
    Ok(CovectorSet(composition_closure(a.cols(), &co)))
}

/// `σ(row space of M)` for any matrix with at least one column.
pub fn row_space_signs(m: &RationalMatrix) -> CovectorSet {
    let basis = row_basis(m);
    if basis.rows() == 0 {
        let mut zero = SignVectorSet::new(m.cols());
        zero.insert(SignVector::zero(m.cols())).expect("length");
        return CovectorSet(zero);
    }
    let co = cocircuits_unchecked(&basis);
    CovectorSet(composition_closure(m.cols(), &co))
}

/// `σ(im M)`, the sign vectors of the column space.
pub fn image_signs(m: &RationalMatrix) -> CovectorSet {
    row_space_signs(&m.transpose())
}

/// `σ(ker A)`, computed as the covectors of `Kᵀ` for a kernel basis `K`.
pub fn matroid_vectors(a: &RationalMatrix) -> CovectorSet {
    row_space_signs(&kernel_basis(a).transpose())
}

/// True iff the chirotopes agree up to a global sign.
pub fn same_oriented_matroid(a: &RationalMatrix, bt: &RationalMatrix) -> Result<bool> {
    if a.rows() != bt.rows() || a.cols() != bt.cols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} against {}x{}",
            a.rows(),
            a.cols(),
            bt.rows(),
            bt.cols()
        )));
    }
    let ca = chirotope(a)?;
    let cb = chirotope(bt)?;
    Ok(ca == cb || ca == cb.negated())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(strs: &[&str]) -> SignVectorSet {
        let vs: Vec<SignVector> = strs.iter().map(|s| s.parse().unwrap()).collect();
        SignVectorSet::from_vectors(vs[0].len(), vs).unwrap()
    }

    fn signs(c: &Chirotope) -> String {
        c.entries().iter().map(|(_, s)| s.as_char()).collect()
    }

    #[test]
    fn chirotope_examples() {
        let a = RationalMatrix::from_ints(&[[1, 0, 1], [0, 1, 1]]);
        assert_eq!(signs(&chirotope(&a).unwrap()), "++-");
        let b = RationalMatrix::from_ints(&[[2, 0, 3], [0, 5, 4]]);
        assert_eq!(signs(&chirotope(&b).unwrap()), "++-");
        assert_eq!(signs(&chirotope(&RationalMatrix::identity(3)).unwrap()), "+");
        let rd = RationalMatrix::from_ints(&[[1, 2], [2, 4]]);
        assert!(matches!(chirotope(&rd), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn cocircuit_examples() {
        let a = RationalMatrix::from_ints(&[[1, 0, 1], [0, 1, 1]]);
        assert_eq!(cocircuits(&a).unwrap(), set(&["0++", "0--", "+0+", "-0-", "+-0", "-+0"]));
        let id = RationalMatrix::identity(2);
        assert_eq!(cocircuits(&id).unwrap(), set(&["+0", "-0", "0+", "0-"]));
        let dup = RationalMatrix::from_ints(&[[1, 1, 0], [0, 0, 1]]);
        for c in &cocircuits(&dup).unwrap() {
            assert_eq!(c.get(0), c.get(1));
        }
    }

    #[test]
    fn covector_examples() {
        let one = RationalMatrix::from_ints(&[[1]]);
        assert_eq!(covectors(&one).unwrap().into_set(), set(&["0", "+", "-"]));
        assert_eq!(covectors(&RationalMatrix::identity(2)).unwrap().len(), 9);
        let row = RationalMatrix::from_ints(&[[1, -1]]);
        assert_eq!(covectors(&row).unwrap().into_set(), set(&["00", "+-", "-+"]));
        assert!(covectors(&row).unwrap().is_closed());
    }

    #[test]
    fn vector_examples() {
        let row = RationalMatrix::from_ints(&[[1, -1]]);
        assert_eq!(matroid_vectors(&row).into_set(), set(&["00", "++", "--"]));
        assert_eq!(matroid_vectors(&RationalMatrix::identity(2)).into_set(), set(&["00"]));
        let a = RationalMatrix::from_ints(&[[1, 0, 1], [0, 1, 1]]);
        assert_eq!(matroid_vectors(&a).into_set(), set(&["000", "++-", "--+"]));
    }

    #[test]
    fn oriented_matroid_equality() {
        let a = RationalMatrix::from_ints(&[[1, 0, 1], [0, 1, 1]]);
        let b = RationalMatrix::from_ints(&[[2, 0, 3], [0, 5, 4]]);
        let c = RationalMatrix::from_ints(&[[1, 0, 1], [0, 1, -1]]);
        assert!(same_oriented_matroid(&a, &a).unwrap());
        assert!(same_oriented_matroid(&a, &b).unwrap());
        assert!(!same_oriented_matroid(&a, &c).unwrap());
        let neg = RationalMatrix::from_ints(&[[0, 1, 1], [1, 0, 1]]);
        assert!(same_oriented_matroid(&a, &neg).unwrap());
    }
}
