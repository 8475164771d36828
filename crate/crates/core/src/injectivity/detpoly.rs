use rayon::prelude::*;
use rug::Rational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::ser_rational;
use crate::linalg::{minor, permutation_sign_tau, IndexSet, RationalMatrix};
use crate::sign::Sign;

/// One monomial `coeff * kappa^J * lambda^I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DetTerm {
    #[serde(rename = "I")]
    pub lambda: IndexSet,
    #[serde(rename = "J")]
    pub kappa: IndexSet,
    #[serde(serialize_with = "ser_rational")]
    pub coeff: Rational,
}

/// `det(Γ)` as a polynomial in symbolic `kappa`, `lambda`: nonzero terms
/// sorted by `(I, J)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct SymbolicDetPoly {
    terms: Vec<DetTerm>,
}

impl SymbolicDetPoly {
    /// Builds a polynomial from arbitrary terms: merges repeated keys,
    /// drops zero coefficients, sorts.
    pub fn from_terms(terms: impl IntoIterator<Item = DetTerm>) -> Self {
        let mut map: std::collections::BTreeMap<(IndexSet, IndexSet), Rational> = Default::default();
        for t in terms {
            *map.entry((t.lambda, t.kappa)).or_default() += t.coeff;
        }
        SymbolicDetPoly {
            terms: map
                .into_iter()
                .filter(|(_, c)| c.cmp0().is_ne())
                .map(|((lambda, kappa), coeff)| DetTerm { lambda, kappa, coeff })
                .collect(),
        }
    }

    pub fn terms(&self) -> &[DetTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The common sign of all coefficients, if there is one.
    pub fn uniform_sign(&self) -> Option<Sign> {
        let first = Sign::of(&self.terms.first()?.coeff);
        self.terms
            .iter()
            .all(|t| Sign::of(&t.coeff) == first)
            .then_some(first)
    }
}

/// Coefficients of `det(Γ)` where `Γ` stacks `Z` on top of
/// `A' diag(kappa) B diag(lambda)`. With `z = None` (only when `s = n`),
/// `Γ = A' diag(kappa) B diag(lambda)`.
pub fn gamma_det_poly(
    aprime: &RationalMatrix,
    b: &RationalMatrix,
    z: Option<&RationalMatrix>,
) -> Result<SymbolicDetPoly> {
    let (s, r) = (aprime.rows(), aprime.cols());
    let n = b.cols();
    if b.rows() != r {
        return Err(Error::ShapeMismatch(format!(
            "A' has {r} columns but B has {} rows",
            b.rows()
        )));
    }
    if s > n {
        return Err(Error::ShapeMismatch(format!("A' has {s} rows, more than n = {n}")));
    }
    match z {
        Some(z) if z.rows() != n - s || z.cols() != n => {
            return Err(Error::ShapeMismatch(format!(
                "Z is {}x{}, expected {}x{n}",
                z.rows(),
                z.cols(),
                n - s
            )))
        }
        None if s != n => {
            return Err(Error::ShapeMismatch("Z is required when s < n".into()));
        }
        _ => {}
    }

    let all_s = IndexSet::full(s);
    let a_minors: Vec<(IndexSet, Rational)> = IndexSet::combinations(r, s)
        .map(|j| {
            let d = minor(aprime, &all_s, &j).expect("sizes match");
            (j, d)
        })
        .filter(|(_, d)| d.cmp0().is_ne())
        .collect();
    let lambdas: Vec<IndexSet> = IndexSet::combinations(n, s).collect();

    let per_i: Vec<Vec<DetTerm>> = lambdas
        .par_iter()
        .map(|i| {
            let mut zc = match z {
                Some(z) => minor(z, &IndexSet::full(n - s), &i.complement()).expect("sizes"),
                None => Rational::from(1),
            };
            if zc.cmp0().is_eq() {
                return Vec::new();
            }
            if permutation_sign_tau(i) == Sign::Minus {
                zc = -zc;
            }
            a_minors
                .iter()
                .filter_map(|(j, da)| {
                    let db = minor(b, j, i).expect("sizes match");
                    if db.cmp0().is_eq() {
                        return None;
                    }
                    let coeff = Rational::from(&zc * da) * db;
                    Some(DetTerm { lambda: i.clone(), kappa: j.clone(), coeff })
                })
                .collect()
        })
        .collect();
    Ok(SymbolicDetPoly::from_terms(per_i.into_iter().flatten()))
}

/// True iff the polynomial has a term and all coefficients share one sign.
pub fn det_condition(p: &SymbolicDetPoly) -> bool {
    p.uniform_sign().is_some()
}
