//! Injectivity of `f_k(x) = A diag(k) x^B` with respect to a set `S`, for
//! all positive `k`.
//!
//! The map fails to be injective for some `k` exactly when some sign vector
//! is shared by `ker A` and `B(Σ(S*))`. Two routes decide this:
//!
//! * when `S` is a subspace with `dim S = rank A = s`, paired `s x s`
//!   minors of `Ã = C A'` and `B` (and, independently, the coefficients of
//!   the symbolic determinant `det Γ`) must all share one sign;
//! * otherwise, each `mu ∈ σ(ker A)` and `tau ∈ σ(S) \ {0}` gives a linear
//!   sign system that must be infeasible.
//!
//! Failures come with an explicit `(kappa, x, y)`.

mod counterexample;
mod detpoly;
mod minors;
mod search;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub use counterexample::{
    base_for, construct_counterexample, points_from_log_difference, residual_tolerance,
    Counterexample,
};
pub use detpoly::{det_condition, gamma_det_poly, DetTerm, SymbolicDetPoly};
pub use minors::{check_minors, MinorProduct, MinorsReport};
pub use search::{feasible_pairs, sign_search, PairCertificate, SearchOutcome};

use crate::error::{Error, Result};
use crate::feasibility::{solve_strict, FeasibilityResult, StrictSystem};
use crate::linalg::{column_basis, gale_dual, kernel_basis, rank, row_basis, Rational, RationalMatrix};
use crate::matroid::{image_signs, matroid_vectors};
use crate::numeric::DEFAULT_PRECISION;
use crate::sign::{orthant_feasible_point, sigma, SignVector, SignVectorSet};

/// The set `S` that differences `x - y` are drawn from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubsetSpec {
    /// `S = im(C)`.
    Image(RationalMatrix),
    /// `S = ker(Z)`.
    Kernel(RationalMatrix),
    /// `S = Σ(T)`, the union of the orthants with sign vectors in `T`.
    OrthantUnion(SignVectorSet),
    FullSpace,
}

impl SubsetSpec {
    pub fn orthant_union(t: SignVectorSet) -> Result<Self> {
        if t.iter().any(SignVector::is_zero) {
            return Err(Error::InvalidSignVector("T must not contain the zero vector".into()));
        }
        Ok(SubsetSpec::OrthantUnion(t))
    }

    fn check_ambient(&self, n: usize) -> Result<()> {
        let ok = match self {
            SubsetSpec::Image(c) => c.rows() == n,
            SubsetSpec::Kernel(z) => z.cols() == n,
            SubsetSpec::OrthantUnion(t) => t.ground_len() == n,
            SubsetSpec::FullSpace => true,
        };
        if !ok {
            return Err(Error::ShapeMismatch(format!("S does not live in R^{n}")));
        }
        if let SubsetSpec::OrthantUnion(t) = self {
            if t.iter().any(SignVector::is_zero) {
                return Err(Error::InvalidSignVector("T must not contain the zero vector".into()));
            }
        }
        Ok(())
    }

    /// Columns forming a basis of `S`, for subspaces.
    pub fn basis(&self, n: usize) -> Option<RationalMatrix> {
        match self {
            SubsetSpec::Image(c) => Some(column_basis(c)),
            SubsetSpec::Kernel(z) => Some(kernel_basis(z)),
            SubsetSpec::FullSpace => Some(RationalMatrix::identity(n)),
            SubsetSpec::OrthantUnion(_) => None,
        }
    }

    /// Rows whose common kernel is `S`, for subspaces.
    fn equations(&self, n: usize) -> Option<RationalMatrix> {
        match self {
            SubsetSpec::Image(c) => Some(kernel_basis(&c.transpose()).transpose()),
            SubsetSpec::Kernel(z) => Some(row_basis(z)),
            SubsetSpec::FullSpace => Some(RationalMatrix::zeros(0, n)),
            SubsetSpec::OrthantUnion(_) => None,
        }
    }

    /// The nonzero sign vectors of `S`.
    pub fn nonzero_signs(&self, n: usize) -> SignVectorSet {
        match self {
            SubsetSpec::OrthantUnion(t) => t.without_zero(),
            _ => image_signs(&self.basis(n).expect("subspace")).into_set().without_zero(),
        }
    }

    /// An exact point `z ∈ S` with `σ(z) = tau`.
    pub fn point_with_signs(&self, tau: &SignVector) -> Result<Vec<Rational>> {
        let n = tau.len();
        match self {
            SubsetSpec::OrthantUnion(t) => {
                if !t.contains(tau) {
                    return Err(Error::Invalid(format!("{tau} is not in T")));
                }
                Ok(orthant_feasible_point(tau))
            }
            _ => {
                let eqs = self.equations(n).expect("subspace");
                let mut sys = StrictSystem::with_signs(tau);
                sys.add_equalities_at(&eqs, 0)?;
                match solve_strict(&sys)? {
                    FeasibilityResult::Feasible(z) => Ok(z),
                    FeasibilityResult::Infeasible(_) => {
                        Err(Error::Invalid(format!("S has no point with sign vector {tau}")))
                    }
                }
            }
        }
    }

    /// Exact test that `x - y ∈ S`.
    pub fn contains_difference(&self, x: &[Rational], y: &[Rational]) -> Result<bool> {
        let d: Vec<Rational> = x.iter().zip(y).map(|(a, b)| Rational::from(a - b)).collect();
        match self {
            SubsetSpec::OrthantUnion(t) => Ok(t.contains(&sigma(&d)?)),
            _ => {
                let eqs = self.equations(d.len()).expect("subspace");
                Ok(eqs.mul_vec(&d)?.iter().all(|q| q.cmp0().is_eq()))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Route {
    /// Paired minors (cross-checked against `det Γ`) when applicable,
    /// otherwise the sign search.
    #[default]
    Auto,
    Minors,
    DetPoly,
    SignSearch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Minors,
    DetPoly,
    SignSearch,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub route: Route,
    pub precision: u32,
    pub construct_counterexample: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            route: Route::Auto,
            precision: DEFAULT_PRECISION,
            construct_counterexample: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum Certificate {
    Minors {
        minors: MinorsReport,
        #[serde(skip_serializing_if = "Option::is_none")]
        det_poly: Option<SymbolicDetPoly>,
    },
    DetPoly {
        det_poly: SymbolicDetPoly,
    },
    SignSearch {
        pairs_checked: usize,
        pairs: Vec<PairCertificate>,
    },
    EmptyCondition {
        reason: String,
    },
}

/// Why injectivity fails, at the level of the route that decided it.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Conflict {
    Minors {
        /// `None` when every product vanishes.
        pair: Option<(MinorProduct, MinorProduct)>,
    },
    DetPoly {
        /// `None` when the polynomial is zero.
        pair: Option<(DetTerm, DetTerm)>,
    },
    SignPair {
        mu: SignVector,
        tau: SignVector,
    },
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub injective: bool,
    pub method: Method,
    pub certificate: Option<Certificate>,
    pub conflict: Option<Conflict>,
    pub counterexample: Option<Counterexample>,
    pub warnings: Vec<String>,
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Verdict", 6)?;
        st.serialize_field("injective", &self.injective)?;
        st.serialize_field("method", &self.method)?;
        st.serialize_field("certificate", &self.certificate)?;
        st.serialize_field("conflict", &self.conflict)?;
        st.serialize_field("counterexample", &self.counterexample)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

fn check_shapes(a: &RationalMatrix, b: &RationalMatrix) -> Result<()> {
    if a.cols() != b.rows() {
        return Err(Error::ShapeMismatch(format!(
            "A is {}x{} but B is {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    if a.cols() == 0 || b.cols() == 0 {
        return Err(Error::ShapeMismatch("A and B need at least one column".into()));
    }
    Ok(())
}

/// Decides whether `f_k` is injective with respect to `S` for every
/// positive `k`.
pub fn check_injectivity(a: &RationalMatrix, b: &RationalMatrix, s: &SubsetSpec) -> Result<Verdict> {
    check_injectivity_with(a, b, s, &CheckOptions::default())
}

pub fn check_injectivity_with(
    a: &RationalMatrix,
    b: &RationalMatrix,
    s: &SubsetSpec,
    opts: &CheckOptions,
) -> Result<Verdict> {
    check_shapes(a, b)?;
    let n = b.cols();
    s.check_ambient(n)?;

    let mut warnings = Vec::new();
    if b.has_duplicate_rows() {
        warnings.push("B has repeated rows".to_string());
    }

    let basis = s.basis(n);
    let dim = basis.as_ref().map(RationalMatrix::cols);
    if dim == Some(0) || matches!(s, SubsetSpec::OrthantUnion(t) if t.is_empty()) {
        return Ok(Verdict {
            injective: true,
            method: Method::SignSearch,
            certificate: Some(Certificate::EmptyCondition {
                reason: "S contains no nonzero difference".into(),
            }),
            conflict: None,
            counterexample: None,
            warnings,
        });
    }

    let rank_a = rank(a);
    let theorem_applies = dim == Some(rank_a);
    let route = match opts.route {
        Route::Auto if theorem_applies => Route::Minors,
        Route::Auto => Route::SignSearch,
        Route::Minors | Route::DetPoly if !theorem_applies => {
            return Err(Error::Invalid(format!(
                "the minor routes need dim S = rank A (dim S = {:?}, rank A = {rank_a})",
                dim
            )))
        }
        other => other,
    };

    let mut verdict = match route {
        Route::SignSearch => search_route(a, b, s, opts)?,
        Route::Minors | Route::DetPoly => {
            let c = basis.expect("subspace");
            theorem_route(a, b, s, &c, rank_a, route, opts.route == Route::Auto, opts)?
        }
        Route::Auto => unreachable!(),
    };
    verdict.warnings = warnings;
    Ok(verdict)
}

fn search_route(
    a: &RationalMatrix,
    b: &RationalMatrix,
    s: &SubsetSpec,
    opts: &CheckOptions,
) -> Result<Verdict> {
    let mus = matroid_vectors(a).into_set();
    let taus = s.nonzero_signs(b.cols());
    let pairs_checked = mus.len() * taus.len();
    match sign_search(a, b, &mus, &taus)? {
        SearchOutcome::Exhausted(pairs) => Ok(Verdict {
            injective: true,
            method: Method::SignSearch,
            certificate: Some(Certificate::SignSearch { pairs_checked, pairs }),
            conflict: None,
            counterexample: None,
            warnings: Vec::new(),
        }),
        SearchOutcome::Found { mu, tau, witness } => {
            let counterexample = if opts.construct_counterexample {
                Some(construct_counterexample(a, b, s, &mu, &tau, &witness, opts.precision)?)
            } else {
                None
            };
            Ok(Verdict {
                injective: false,
                method: Method::SignSearch,
                certificate: None,
                conflict: Some(Conflict::SignPair { mu, tau }),
                counterexample,
                warnings: Vec::new(),
            })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn theorem_route(
    a: &RationalMatrix,
    b: &RationalMatrix,
    s: &SubsetSpec,
    c: &RationalMatrix,
    rank_a: usize,
    route: Route,
    cross_check: bool,
    opts: &CheckOptions,
) -> Result<Verdict> {
    let n = b.cols();
    let aprime = row_basis(a);
    let z = if rank_a < n { Some(gale_dual(c)?) } else { None };

    let minors = if route == Route::Minors {
        Some(check_minors(&c.mul(&aprime)?, b, rank_a)?)
    } else {
        None
    };
    let poly = if route == Route::DetPoly || cross_check {
        Some(gamma_det_poly(&aprime, b, z.as_ref())?)
    } else {
        None
    };
    let injective = match (&minors, &poly) {
        (Some(m), Some(p)) => {
            if m.holds != det_condition(p) {
                return Err(Error::Internal(
                    "paired minors and det Γ coefficients disagree".into(),
                ));
            }
            m.holds
        }
        (Some(m), None) => m.holds,
        (None, Some(p)) => det_condition(p),
        (None, None) => unreachable!(),
    };
    let method = if route == Route::Minors { Method::Minors } else { Method::DetPoly };

    if injective {
        let certificate = match minors {
            Some(m) => Certificate::Minors { minors: m, det_poly: poly },
            None => Certificate::DetPoly { det_poly: poly.expect("det route") },
        };
        return Ok(Verdict {
            injective,
            method,
            certificate: Some(certificate),
            conflict: None,
            counterexample: None,
            warnings: Vec::new(),
        });
    }

    let conflict = match (&minors, &poly) {
        (Some(m), _) => Conflict::Minors { pair: m.conflict.clone() },
        (None, Some(p)) => Conflict::DetPoly { pair: det_conflict(p) },
        (None, None) => unreachable!(),
    };
    let counterexample = if opts.construct_counterexample {
        let search = search_route(a, b, s, opts)?;
        if search.injective {
            return Err(Error::Internal(
                "minor condition fails but every sign system is infeasible".into(),
            ));
        }
        search.counterexample
    } else {
        None
    };
    Ok(Verdict {
        injective,
        method,
        certificate: None,
        conflict: Some(conflict),
        counterexample,
        warnings: Vec::new(),
    })
}

fn det_conflict(p: &SymbolicDetPoly) -> Option<(DetTerm, DetTerm)> {
    let pos = p.terms().iter().find(|t| t.coeff.cmp0().is_gt())?;
    let neg = p.terms().iter().find(|t| t.coeff.cmp0().is_lt())?;
    Some((pos.clone(), neg.clone()))
}

/// `σ(ker B) ∩ σ(S \ {0}) = ∅`: the monomial map `x ↦ x^B` is injective
/// with respect to `S`. Necessary for injectivity of `f_k`.
pub fn monomial_map_injective(b: &RationalMatrix, s: &SubsetSpec) -> Result<bool> {
    s.check_ambient(b.cols())?;
    let kernel = matroid_vectors(b).into_set();
    let taus = s.nonzero_signs(b.cols());
    Ok(kernel.intersection(&taus).is_empty())
}
