//! Hypothesis checks for at-most-one and exactly-one positive solutions of
//! `A diag(c) x^B = y`, and the classical univariate sign-variation count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{cone_interior_membership, open_halfspace_contains_rows, FeasibilityResult};
use crate::injectivity::{check_minors, MinorsReport};
use crate::io::ser_rationals;
use crate::linalg::{minor, rank, IndexSet, Rational, RationalMatrix};
use crate::matroid::{image_signs, matroid_vectors};
use crate::sign::Sign;

/// Largest ground set for which sign-set intersection is attempted.
pub const MAX_INTERSECTION_GROUND: usize = 16;

/// Per-subset maximal minor signs of `A` and `B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinorSignPair {
    #[serde(rename = "J")]
    pub cols: IndexSet,
    pub sign_a: Sign,
    pub sign_b: Sign,
}

#[derive(Clone, Debug, Serialize)]
pub struct DescartesReport {
    pub bnd_holds: bool,
    pub ex_holds: bool,
    pub halfspace: bool,
    #[serde(serialize_with = "ser_opt_rationals")]
    pub halfspace_witness: Option<Vec<Rational>>,
    pub matroid_equal: bool,
    /// First `J` whose minor signs break the agreement, paired with the
    /// first `J` that fixed the orientation.
    pub conflicting_j: Option<(MinorSignPair, MinorSignPair)>,
    pub minor_signs: Vec<MinorSignPair>,
    pub bnd: MinorsReport,
    pub cone_membership: Option<bool>,
}

fn ser_opt_rationals<S: serde::Serializer>(
    v: &Option<Vec<Rational>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct W<'a>(#[serde(serialize_with = "ser_rationals")] &'a [Rational]);
    match v {
        Some(v) => s.serialize_some(&W(v)),
        None => s.serialize_none(),
    }
}

fn check_square_pair(a: &RationalMatrix, b: &RationalMatrix) -> Result<()> {
    let (n, r) = (a.rows(), a.cols());
    if b.rows() != r || b.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "A is {n}x{r} but B is {}x{}",
            b.rows(),
            b.cols()
        )));
    }
    for m in [a, b] {
        let rk = rank(m);
        if rk < n {
            return Err(Error::RankDeficient { rank: rk, expected: n });
        }
    }
    Ok(())
}

/// All nonzero products `det(A[:, J]) det(B[J, :])` share a sign, and one
/// is nonzero.
pub fn check_bnd(a: &RationalMatrix, b: &RationalMatrix) -> Result<MinorsReport> {
    check_square_pair(a, b)?;
    check_minors(a, b, a.rows())
}

fn minor_sign_pairs(a: &RationalMatrix, b: &RationalMatrix) -> Vec<MinorSignPair> {
    let n = a.rows();
    let all = IndexSet::full(n);
    let subsets: Vec<IndexSet> = IndexSet::combinations(a.cols(), n).collect();
    subsets
        .into_par_iter()
        .map(|j| {
            let da = minor(a, &all, &j).expect("sizes");
            let db = minor(b, &j, &all).expect("sizes");
            MinorSignPair { cols: j, sign_a: Sign::of(&da), sign_b: Sign::of(&db) }
        })
        .collect()
}

/// The (bnd) hypotheses plus: the rows of `B` lie in an open half-space,
/// and `sign det(A[:, J]) = ± sign det(B[J, :])` for all `J`, with one
/// global sign and zeros matching zeros.
pub fn check_ex(a: &RationalMatrix, b: &RationalMatrix) -> Result<DescartesReport> {
    let bnd = check_bnd(a, b)?;
    let half = open_halfspace_contains_rows(b)?;
    let pairs = minor_sign_pairs(a, b);

    let mut orientation: Option<(Sign, &MinorSignPair)> = None;
    let mut conflicting_j = None;
    for p in &pairs {
        let rel = p.sign_a * p.sign_b;
        let zero_mismatch = p.sign_a.is_zero() != p.sign_b.is_zero();
        if zero_mismatch {
            let anchor = orientation.map_or(p, |(_, q)| q);
            conflicting_j = Some((anchor.clone(), p.clone()));
            break;
        }
        if rel.is_zero() {
            continue;
        }
        match orientation {
            None => orientation = Some((rel, p)),
            Some((o, q)) if o != rel => {
                conflicting_j = Some((q.clone(), p.clone()));
                break;
            }
            Some(_) => {}
        }
    }
    let matroid_equal = conflicting_j.is_none() && orientation.is_some();
    let halfspace = half.is_feasible();
    let ex_holds = halfspace && matroid_equal;
    if ex_holds && !bnd.holds {
        return Err(Error::Internal("(ex) holds but (bnd) fails".into()));
    }
    Ok(DescartesReport {
        bnd_holds: bnd.holds,
        ex_holds,
        halfspace,
        halfspace_witness: half.witness().map(<[Rational]>::to_vec),
        matroid_equal,
        conflicting_j,
        minor_signs: pairs,
        bnd,
        cone_membership: None,
    })
}

/// Is `y` in the interior of the cone spanned by the columns of `A`?
pub fn cone_query(a: &RationalMatrix, y: &[Rational]) -> Result<FeasibilityResult> {
    cone_interior_membership(a, y)
}

/// Number of sign changes after discarding zeros.
pub fn univariate_sign_variations(coeffs: &[Rational]) -> usize {
    let signs: Vec<Sign> = coeffs.iter().map(Sign::of).filter(|s| !s.is_zero()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// At most one positive solution of `A diag(c) x^B = y` for every `c`
/// and `y`: `σ(ker A) ∩ σ(im B) = {0}`, for `A` of size `m x r` and `B` of
/// rank `n`.
pub fn check_at_most_one_solution(a: &RationalMatrix, b: &RationalMatrix) -> Result<bool> {
    let (m, r, n) = (a.rows(), a.cols(), b.cols());
    if b.rows() != r {
        return Err(Error::ShapeMismatch(format!(
            "A has {r} columns but B has {} rows",
            b.rows()
        )));
    }
    let rb = rank(b);
    if rb < n {
        return Err(Error::RankDeficient { rank: rb, expected: n });
    }
    if m < n {
        return Ok(false);
    }
    if m == n && rank(a) == n {
        return Ok(check_bnd(a, b)?.holds);
    }
    if r > MAX_INTERSECTION_GROUND {
        return Err(Error::TooLarge(format!(
            "sign-set intersection over {r} coordinates (limit {MAX_INTERSECTION_GROUND})"
        )));
    }
    let kernel = matroid_vectors(a).into_set();
    let image = image_signs(b).into_set();
    Ok(kernel.intersection(&image).is_trivial())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_ints(rows)
    }

    fn q(v: i64) -> Rational {
        Rational::from(v)
    }

    #[test]
    fn bnd_examples() {
        let b = m(&[&[1], &[2], &[5]]);
        assert!(!check_bnd(&m(&[&[1, -1, 1]]), &b).unwrap().holds);
        assert!(check_bnd(&m(&[&[1, 2, 3]]), &b).unwrap().holds);
        let a = m(&[&[1, 0, 2], &[-1, 3, 1]]);
        assert!(check_bnd(&a, &a.transpose()).unwrap().holds);
        assert!(matches!(
            check_bnd(&m(&[&[1, 2], &[2, 4]]), &m(&[&[1, 0], &[0, 1]])),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn ex_examples() {
        let b = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        let rep = check_ex(&b.transpose(), &b).unwrap();
        assert!(rep.ex_holds && rep.bnd_holds);

        let rep = check_ex(&m(&[&[1, 1]]), &m(&[&[1], &[-1]])).unwrap();
        assert!(!rep.ex_holds && !rep.halfspace);

        let rep = check_ex(&m(&[&[1, 2]]), &m(&[&[1], &[3]])).unwrap();
        assert!(rep.ex_holds);
        // 2x^3 + x + c0 with c0 < 0: one sign variation.
        assert_eq!(univariate_sign_variations(&[q(-1), q(1), q(0), q(2)]), 1);
    }

    #[test]
    fn ex_requires_matching_zero_patterns() {
        // J = {2,3} vanishes for A but not for B.
        let a = m(&[&[1, 0, 0], &[0, 1, 1]]);
        let b = m(&[&[1, 0], &[0, 1], &[1, 2]]);
        let rep = check_ex(&a, &b).unwrap();
        assert!(!rep.matroid_equal);
        assert!(rep.conflicting_j.is_some());
    }

    #[test]
    fn cone_examples() {
        let id = RationalMatrix::identity(2);
        assert!(cone_query(&id, &[q(1), q(1)]).unwrap().is_feasible());
        assert!(!cone_query(&id, &[q(1), q(0)]).unwrap().is_feasible());
        let a = m(&[&[1, 0, 1], &[0, 1, 1]]);
        assert!(cone_query(&a, &[q(2), q(2)]).unwrap().is_feasible());
    }

    #[test]
    fn sign_variation_examples() {
        assert_eq!(univariate_sign_variations(&[q(-3), q(1), q(-1), q(1)]), 3);
        assert_eq!(univariate_sign_variations(&[q(0), q(1), q(-1), q(1)]), 2);
        assert_eq!(univariate_sign_variations(&[q(2), q(1), q(-1), q(1)]), 2);
        assert_eq!(univariate_sign_variations(&[q(1), q(2), q(3)]), 0);
    }

    #[test]
    fn at_most_one_solution_examples() {
        assert!(!check_at_most_one_solution(&m(&[&[1, -1]]), &RationalMatrix::identity(2)).unwrap());
        let a = m(&[&[1, 2, 3]]);
        let b = m(&[&[1], &[2], &[5]]);
        assert_eq!(
            check_at_most_one_solution(&a, &b).unwrap(),
            check_bnd(&a, &b).unwrap().holds
        );
        // m > n: two equations in one unknown.
        let a = m(&[&[1, 0, -1], &[0, 1, -1]]);
        let b = m(&[&[1], &[1], &[1]]);
        assert!(!check_at_most_one_solution(&a, &b).unwrap());
        let b = m(&[&[1], &[-1], &[2]]);
        assert!(check_at_most_one_solution(&a, &b).unwrap());
    }
}
