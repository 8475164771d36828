//! Reaction networks with generalized mass-action kinetics,
//! `dx/dt = N diag(kappa) x^V`, and what injectivity says about their
//! steady states.

mod parse;

use rug::Float;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

pub use parse::{parse_kinetic_orders, parse_network, render};

use crate::error::{Error, Result};
use crate::feasibility::{solve_strict, FeasibilityResult, StrictSystem};
use crate::injectivity::{
    base_for, check_injectivity_with, feasible_pairs, points_from_log_difference, residual_tolerance,
    CheckOptions, SubsetSpec, Verdict,
};
use crate::io::{format_rationals, matrix_to_json_value};
use crate::linalg::{primitive_integer_vector, Rational, RationalMatrix};
use crate::matroid::{image_signs, matroid_vectors};
use crate::numeric::{
    evaluate_map_exact, monomials_exact, monomials_interval, rational_to_decimal,
    relative_residual_bound, to_decimal, DEFAULT_PRECISION,
};
use crate::sign::{sigma, Sign, SignVector, SignVectorSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub label: String,
    /// Stoichiometric coefficients indexed by species.
    pub reactant: Vec<Rational>,
    pub product: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReactionNetwork {
    species: Vec<String>,
    reactions: Vec<Reaction>,
    kinetic_orders: Option<RationalMatrix>,
    warnings: Vec<String>,
}

impl ReactionNetwork {
    pub fn new(species: Vec<String>, reactions: Vec<Reaction>) -> Result<Self> {
        let n = species.len();
        if n == 0 || reactions.is_empty() {
            return Err(Error::Invalid("a network needs a species and a reaction".into()));
        }
        let mut warnings = Vec::new();
        for (j, r) in reactions.iter().enumerate() {
            if r.reactant.len() != n || r.product.len() != n {
                return Err(Error::ShapeMismatch(format!("reaction {:?} has wrong length", r.label)));
            }
            if r.reactant.iter().chain(&r.product).any(|q| q.cmp0().is_lt()) {
                return Err(Error::Invalid(format!("reaction {:?} has a negative coefficient", r.label)));
            }
            if reactions[..j].iter().any(|o| o.label == r.label) {
                return Err(Error::Invalid(format!("duplicate reaction label {:?}", r.label)));
            }
            if r.reactant == r.product {
                warnings.push(format!(
                    "reaction {} has identical reactant and product complexes",
                    r.label
                ));
            }
        }
        Ok(ReactionNetwork { species, reactions, kinetic_orders: None, warnings })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn reactions(&self) -> &[Reaction] {
        &self.reactions
    }

    pub fn labels(&self) -> Vec<&str> {
        self.reactions.iter().map(|r| r.label.as_str()).collect()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `V`, `r x n`: the override if set, otherwise reactant stoichiometry.
    pub fn kinetic_orders(&self) -> RationalMatrix {
        match &self.kinetic_orders {
            Some(v) => v.clone(),
            None => RationalMatrix::from_rows(self.reactions.iter().map(|r| r.reactant.clone()).collect())
                .expect("rectangular"),
        }
    }

    pub fn with_kinetic_orders(mut self, v: RationalMatrix) -> Result<Self> {
        if v.rows() != self.reactions.len() || v.cols() != self.species.len() {
            return Err(Error::ShapeMismatch(format!(
                "kinetic orders must be {}x{}",
                self.reactions.len(),
                self.species.len()
            )));
        }
        self.kinetic_orders = Some(v);
        Ok(self)
    }

    /// `(N, V)`: `N` is `n x r` with reaction vectors as columns.
    pub fn stoichiometry(&self) -> (RationalMatrix, RationalMatrix) {
        let cols: Vec<Vec<Rational>> = self
            .reactions
            .iter()
            .map(|r| r.product.iter().zip(&r.reactant).map(|(p, q)| Rational::from(p - q)).collect())
            .collect();
        let n = RationalMatrix::from_columns(self.species.len(), &cols).expect("rectangular");
        (n, self.kinetic_orders())
    }
}

/// Rate constants with two distinct positive steady states in one
/// compatibility class: `f(x) = f(y) = 0` and `x - y ∈ im N`, exactly.
#[derive(Clone, Debug)]
pub struct SteadyStatePair {
    pub kappa: Vec<Rational>,
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
}

impl Serialize for SteadyStatePair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SteadyStatePair", 3)?;
        st.serialize_field("kappa", &format_rationals(&self.kappa))?;
        st.serialize_field("x", &format_rationals(&self.x))?;
        st.serialize_field("y", &format_rationals(&self.y))?;
        st.end()
    }
}

#[derive(Clone, Debug)]
pub struct CrnVerdict {
    pub species: Vec<String>,
    pub labels: Vec<String>,
    pub n: RationalMatrix,
    pub v: RationalMatrix,
    /// Injectivity on every compatibility class, for all rate constants.
    pub precluded: bool,
    pub injectivity: Verdict,
    pub steady_state_pair: Option<SteadyStatePair>,
    pub note: String,
    pub warnings: Vec<String>,
}

impl Serialize for CrnVerdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CrnVerdict", 9)?;
        st.serialize_field("species", &self.species)?;
        st.serialize_field("reactions", &self.labels)?;
        st.serialize_field("N", &matrix_to_json_value(&self.n))?;
        st.serialize_field("V", &matrix_to_json_value(&self.v))?;
        st.serialize_field("precluded", &self.precluded)?;
        st.serialize_field("injectivity", &self.injectivity)?;
        st.serialize_field("steady_state_pair", &self.steady_state_pair)?;
        st.serialize_field("note", &self.note)?;
        st.serialize_field("warnings", &self.warnings)?;
        st.end()
    }
}

pub fn preclude_multistationarity(net: &ReactionNetwork) -> Result<CrnVerdict> {
    preclude_multistationarity_with(net, &CheckOptions::default())
}

/// Injectivity of `N diag(kappa) x^V` with respect to `im N`. When it
/// fails, an exact pair of distinct steady states is searched for.
pub fn preclude_multistationarity_with(net: &ReactionNetwork, opts: &CheckOptions) -> Result<CrnVerdict> {
    let (n, v) = net.stoichiometry();
    let s = SubsetSpec::Image(n.clone());
    let injectivity = check_injectivity_with(&n, &v, &s, opts)?;
    let precluded = injectivity.injective;
    let steady_state_pair = if precluded { None } else { steady_state_pair(&n, &v, &s)? };
    let note = if precluded {
        "the steady-state map is injective on every compatibility class for all rate constants: \
         no compatibility class has more than one positive steady state"
    } else if steady_state_pair.is_some() {
        "injectivity fails, and the reported rate constants give two positive steady states \
         in one compatibility class"
    } else {
        "injectivity fails; this alone does not imply multistationarity, and no pair of \
         steady states was found"
    };
    let mut warnings = net.warnings().to_vec();
    warnings.extend(injectivity.warnings.iter().cloned());
    Ok(CrnVerdict {
        species: net.species().to_vec(),
        labels: net.labels().iter().map(|s| s.to_string()).collect(),
        n,
        v,
        precluded,
        injectivity,
        steady_state_pair,
        note: note.into(),
        warnings,
    })
}

const PAIR_LIMIT: usize = 32;
const MAX_SCALE: i64 = 3;

/// For `x`, `y` with `x - y ∈ S` and rate ratios `rho = x^V / y^V`, a
/// positive `p ∈ ker N` with `rho ∘ p ∈ ker N` gives `kappa = p / y^V`
/// with both points steady. Candidates for `log(x / y)` come from the
/// feasible sign pairs, scaled by small integers.
fn steady_state_pair(n: &RationalMatrix, v: &RationalMatrix, s: &SubsetSpec) -> Result<Option<SteadyStatePair>> {
    if !v.is_integral() {
        return Ok(None);
    }
    let r = v.rows();
    let species = v.cols();
    let mus = matroid_vectors(n).into_set();
    let taus = s.nonzero_signs(species);
    for (_, tau, witness) in feasible_pairs(n, v, &mus, &taus, PAIR_LIMIT)? {
        let z = s.point_with_signs(&tau)?;
        let base_v = primitive_integer_vector(&witness[r..]);
        for k in 1..=MAX_SCALE {
            let lv: Vec<Rational> = base_v.iter().map(|q| Rational::from(q * k)).collect();
            let (x, y) = points_from_log_difference(&z, &lv, &base_for(&lv))?;
            let mx = monomials_exact(v, &x).expect("integral");
            let my = monomials_exact(v, &y).expect("integral");
            let rho: Vec<Rational> = mx.iter().zip(&my).map(|(a, b)| Rational::from(a / b)).collect();
            let mut sys = StrictSystem::with_signs(&SignVector::new(vec![Sign::Plus; r])?);
            sys.add_equalities_at(n, 0)?;
            sys.add_equalities_at(&n.scale_columns(&rho)?, 0)?;
            let FeasibilityResult::Feasible(p) = solve_strict(&sys)? else {
                continue;
            };
            let kappa: Vec<Rational> = p.iter().zip(&my).map(|(a, b)| Rational::from(a / b)).collect();
            let fx = evaluate_map_exact(n, v, &kappa, &x)?.expect("integral");
            let fy = evaluate_map_exact(n, v, &kappa, &y)?.expect("integral");
            let zero = |f: &[Rational]| f.iter().all(|q| q.cmp0().is_eq());
            if !zero(&fx) || !zero(&fy) || x == y || !s.contains_difference(&x, &y)? {
                return Err(Error::VerificationFailed("steady-state pair".into()));
            }
            return Ok(Some(SteadyStatePair { kappa, x, y }));
        }
    }
    Ok(None)
}

fn subspace_signs(s: &SubsetSpec, n: usize) -> Result<SignVectorSet> {
    match s.basis(n) {
        Some(c) => Ok(image_signs(&c).into_set()),
        None => Err(Error::Invalid("S must be a subspace".into())),
    }
}

fn check_special_input(m: &RationalMatrix, s: &SubsetSpec) -> Result<usize> {
    let n = m.cols();
    let ok = match s {
        SubsetSpec::Image(c) => c.rows() == n,
        SubsetSpec::Kernel(z) => z.cols() == n,
        SubsetSpec::FullSpace => true,
        SubsetSpec::OrthantUnion(_) => return Err(Error::Invalid("S must be a subspace".into())),
    };
    if !ok {
        return Err(Error::ShapeMismatch(format!("S does not live in R^{n}")));
    }
    Ok(n)
}

/// `σ(ker M) ∩ σ(S) = {0}`: at most one special steady state in each
/// compatibility class, for every choice of rate constants.
pub fn special_unique(m: &RationalMatrix, s: &SubsetSpec) -> Result<bool> {
    let n = check_special_input(m, s)?;
    let kernel = matroid_vectors(m).into_set();
    Ok(kernel.intersection(&subspace_signs(s, n)?).is_trivial())
}

/// Two distinct positive points with equal monomials `x^M = y^M` whose
/// difference lies in `S`.
#[derive(Clone, Debug)]
pub struct SpecialWitness {
    /// Shared sign vector of `ker M` and `S`.
    pub rho: SignVector,
    /// Integral `v ∈ ker M` with `x / y = base^v`.
    pub v: Vec<Rational>,
    pub base: Rational,
    /// `z = x - y ∈ S`.
    pub z: Vec<Rational>,
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    /// Hypothesis that every positive point is a special steady state for
    /// some rate constants, as asserted by the caller.
    pub assume_coset: bool,
    /// Bound on the relative difference of `x^M` and `y^M` from an
    /// interval evaluation; `None` when checked exactly.
    pub residual_bound: Option<Float>,
}

impl SpecialWitness {
    /// Multiple special steady states in one compatibility class follow
    /// only under the caller's hypothesis.
    pub fn implies_multistationarity(&self) -> bool {
        self.assume_coset
    }
}

impl Serialize for SpecialWitness {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dec = |v: &[Rational]| -> Vec<String> { v.iter().map(rational_to_decimal).collect() };
        let mut st = s.serialize_struct("SpecialWitness", 11)?;
        st.serialize_field("rho", &self.rho)?;
        st.serialize_field("v", &format_rationals(&self.v))?;
        st.serialize_field("base", &crate::io::format_rational(&self.base))?;
        st.serialize_field("z", &format_rationals(&self.z))?;
        st.serialize_field("x", &dec(&self.x))?;
        st.serialize_field("y", &dec(&self.y))?;
        st.serialize_field("x_exact", &format_rationals(&self.x))?;
        st.serialize_field("y_exact", &format_rationals(&self.y))?;
        st.serialize_field("assume_coset", &self.assume_coset)?;
        st.serialize_field("multistationary", &self.implies_multistationarity())?;
        let bound = match &self.residual_bound {
            Some(b) => to_decimal(b),
            None => "0".to_string(),
        };
        st.serialize_field("residual_bound", &bound)?;
        st.end()
    }
}

/// Builds `(x*, y*)` from a shared nonzero sign vector of `ker M` and `S`,
/// or `None` when the sign sets meet only in zero.
pub fn multistationarity_witness(
    m: &RationalMatrix,
    s: &SubsetSpec,
    assume_coset: bool,
) -> Result<Option<SpecialWitness>> {
    let n = check_special_input(m, s)?;
    let kernel = matroid_vectors(m).into_set();
    let shared = kernel.intersection(&subspace_signs(s, n)?);
    let Some(rho) = shared
        .iter()
        .find(|r| r.signs().iter().find(|g| !g.is_zero()) == Some(&Sign::Plus))
        .cloned()
    else {
        return Ok(None);
    };

    let mut sys = StrictSystem::with_signs(&rho);
    sys.add_equalities_at(m, 0)?;
    let v = match solve_strict(&sys)? {
        FeasibilityResult::Feasible(w) => primitive_integer_vector(&w),
        FeasibilityResult::Infeasible(_) => {
            return Err(Error::Internal(format!("{rho} is a vector of M but has no kernel point")))
        }
    };
    let z = s.point_with_signs(&rho)?;
    let base = base_for(&v);
    let (x, y) = points_from_log_difference(&z, &v, &base)?;

    if !m.mul_vec(&v)?.iter().all(|q| q.cmp0().is_eq()) || sigma(&v)? != rho {
        return Err(Error::VerificationFailed("log difference is not in ker M".into()));
    }
    if !s.contains_difference(&x, &y)? || x == y {
        return Err(Error::VerificationFailed("x - y is not a nonzero point of S".into()));
    }
    let residual_bound = match (monomials_exact(m, &x), monomials_exact(m, &y)) {
        (Some(mx), Some(my)) => {
            if mx != my {
                return Err(Error::VerificationFailed("x^M and y^M differ".into()));
            }
            None
        }
        _ => {
            let prec = DEFAULT_PRECISION;
            let mx = monomials_interval(m, &x, prec)?;
            let my = monomials_interval(m, &y, prec)?;
            let bound = relative_residual_bound(&mx, &my, prec);
            if bound > residual_tolerance(prec) {
                return Err(Error::VerificationFailed("x^M and y^M differ numerically".into()));
            }
            Some(bound)
        }
    };
    Ok(Some(SpecialWitness { rho, v, base, z, x, y, assume_coset, residual_bound }))
}

#[derive(Clone, Debug)]
pub struct SpecialReport {
    pub unique: bool,
    pub witness: Option<SpecialWitness>,
}

impl Serialize for SpecialReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SpecialReport", 2)?;
        st.serialize_field("unique", &self.unique)?;
        st.serialize_field("witness", &self.witness)?;
        st.end()
    }
}

/// Special steady states of a network with respect to its stoichiometric
/// subspace `im N`.
pub fn special_analysis(net: &ReactionNetwork, m: &RationalMatrix, assume_coset: bool) -> Result<SpecialReport> {
    if m.cols() != net.species().len() {
        return Err(Error::ShapeMismatch(format!(
            "M has {} columns but the network has {} species",
            m.cols(),
            net.species().len()
        )));
    }
    let (n, _) = net.stoichiometry();
    let s = SubsetSpec::Image(n);
    let unique = special_unique(m, &s)?;
    let witness = multistationarity_witness(m, &s, assume_coset)?;
    if unique == witness.is_some() {
        return Err(Error::Internal("uniqueness and witness disagree".into()));
    }
    Ok(SpecialReport { unique, witness })
}
