use rug::ops::Pow;
use rug::{Float, Integer};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::SubsetSpec;
use crate::error::{Error, Result};
use crate::io::format_rationals;
use crate::linalg::{primitive_integer_vector, Rational, RationalMatrix};
use crate::numeric::{
    evaluate_map, evaluate_map_exact, monomials_exact, monomials_interval, rational_to_decimal,
    relative_residual_bound, to_decimal, RETRY_PRECISION,
};
use crate::sign::{sigma, SignVector};

/// Relative residual accepted for non-integral exponents.
pub fn residual_tolerance(prec: u32) -> Float {
    let q = Rational::from((1, Integer::from(10u32).pow(30)));
    Float::with_val(prec, &q)
}

/// Parameters `kappa` and distinct positive points `x`, `y` with `x - y`
/// in `S` and `f_kappa(x) = f_kappa(y)`.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub kappa: Vec<Rational>,
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    pub mu: SignVector,
    pub tau: SignVector,
    /// `None` when the residual is exactly zero (integral exponents).
    pub residual_bound: Option<Float>,
    pub precision: u32,
}

impl Counterexample {
    pub fn residual_is_exact(&self) -> bool {
        self.residual_bound.is_none()
    }
}

impl Serialize for Counterexample {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dec = |v: &[Rational]| -> Vec<String> { v.iter().map(rational_to_decimal).collect() };
        let mut st = s.serialize_struct("Counterexample", 9)?;
        st.serialize_field("kappa", &format_rationals(&self.kappa))?;
        st.serialize_field("x", &dec(&self.x))?;
        st.serialize_field("y", &dec(&self.y))?;
        st.serialize_field("x_exact", &format_rationals(&self.x))?;
        st.serialize_field("y_exact", &format_rationals(&self.y))?;
        st.serialize_field("mu", &self.mu)?;
        st.serialize_field("tau", &self.tau)?;
        let bound = match &self.residual_bound {
            Some(b) => to_decimal(b),
            None => "0".to_string(),
        };
        st.serialize_field("residual_bound", &bound)?;
        st.serialize_field("precision_bits", &self.precision)?;
        st.end()
    }
}

/// Positive `x`, `y` with `x - y = z` and `x_i / y_i = base^{v_i}`, for
/// `σ(v) = σ(z)` with `v` integral.
pub fn points_from_log_difference(
    z: &[Rational],
    v: &[Rational],
    base: &Rational,
) -> Result<(Vec<Rational>, Vec<Rational>)> {
    if sigma(z)? != sigma(v)? {
        return Err(Error::Invalid("z and v must share a sign vector".into()));
    }
    let mut x = Vec::with_capacity(z.len());
    let mut y = Vec::with_capacity(z.len());
    for (zi, vi) in z.iter().zip(v) {
        if zi.cmp0().is_eq() {
            x.push(Rational::from(1));
            y.push(Rational::from(1));
            continue;
        }
        let k = vi
            .numer()
            .to_i32()
            .filter(|_| *vi.denom() == 1)
            .ok_or_else(|| Error::Invalid("log difference must be a small integer".into()))?;
        let factor = Rational::from(base.pow(k));
        let yi = Rational::from(zi / Rational::from(&factor - 1u32));
        x.push(Rational::from(&yi * &factor));
        y.push(yi);
    }
    Ok((x, y))
}

/// Base for the ratio `x_i / y_i`: 2 for small exponents, otherwise a
/// rational close to 1 so that powers stay moderate.
pub fn base_for(v: &[Rational]) -> Rational {
    let m = v
        .iter()
        .map(|q| Integer::from(q.numer().abs_ref()))
        .max()
        .unwrap_or_default();
    if m <= 32 {
        Rational::from(2)
    } else {
        Rational::from((m.clone() + 1u32, m))
    }
}

/// Builds a counterexample from a feasible pair `(mu, tau)` and its sign
/// system witness `(x̂, ŷ)`: `v` is `ŷ` cleared to integers, `z ∈ S` has
/// sign `tau`, `x`, `y` satisfy `x - y = z` and `x / y = 2^v`, and
/// `kappa_j = x̂_j / (x^B - y^B)_j` where `x̂_j != 0`.
pub fn construct_counterexample(
    a: &RationalMatrix,
    b: &RationalMatrix,
    s: &SubsetSpec,
    mu: &SignVector,
    tau: &SignVector,
    witness: &[Rational],
    prec: u32,
) -> Result<Counterexample> {
    let (r, n) = (b.rows(), b.cols());
    if witness.len() != r + n {
        return Err(Error::ShapeMismatch(format!(
            "pair witness has length {}, expected {}",
            witness.len(),
            r + n
        )));
    }
    let w = &witness[..r];
    let v = primitive_integer_vector(&witness[r..]);
    if sigma(&v)? != *tau || sigma(&b.mul_vec(&v)?)? != *mu || sigma(w)? != *mu {
        return Err(Error::Invalid("witness does not match (mu, tau)".into()));
    }
    if !a.mul_vec(w)?.iter().all(|q| q.cmp0().is_eq()) {
        return Err(Error::Invalid("witness x is not in ker A".into()));
    }
    let z = s.point_with_signs(tau)?;
    let base = base_for(&v);
    let (x, y) = points_from_log_difference(&z, &v, &base)?;

    let kappa_from = |d: &[Rational]| -> Vec<Rational> {
        w.iter()
            .zip(d)
            .map(|(wj, dj)| {
                if wj.cmp0().is_eq() {
                    Rational::from(1)
                } else {
                    Rational::from(wj / dj)
                }
            })
            .collect()
    };

    let result = if let (Some(mx), Some(my)) = (monomials_exact(b, &x), monomials_exact(b, &y)) {
        let d: Vec<Rational> = mx.iter().zip(&my).map(|(p, q)| Rational::from(p - q)).collect();
        let kappa = kappa_from(&d);
        check_positive(&kappa, &x, &y)?;
        let fx = evaluate_map_exact(a, b, &kappa, &x)?.expect("integral exponents");
        let fy = evaluate_map_exact(a, b, &kappa, &y)?.expect("integral exponents");
        if fx != fy {
            return Err(Error::VerificationFailed("exact images differ".into()));
        }
        Counterexample {
            kappa,
            x,
            y,
            mu: mu.clone(),
            tau: tau.clone(),
            residual_bound: None,
            precision: prec,
        }
    } else {
        let mut last = None;
        let mut found = None;
        for p in [prec, prec.max(RETRY_PRECISION)] {
            let mx = monomials_interval(b, &x, p)?;
            let my = monomials_interval(b, &y, p)?;
            let d: Vec<Rational> = mx
                .iter()
                .zip(&my)
                .map(|(p, q)| p.sub(q).midpoint_rational())
                .collect();
            let kappa = kappa_from(&d);
            if check_positive(&kappa, &x, &y).is_err() {
                continue;
            }
            let fx = evaluate_map(a, b, &kappa, &x, p)?;
            let fy = evaluate_map(a, b, &kappa, &y, p)?;
            let bound = relative_residual_bound(&fx, &fy, p);
            if bound <= residual_tolerance(p) {
                found = Some(Counterexample {
                    kappa,
                    x: x.clone(),
                    y: y.clone(),
                    mu: mu.clone(),
                    tau: tau.clone(),
                    residual_bound: Some(bound),
                    precision: p,
                });
                break;
            }
            last = Some(bound);
        }
        found.ok_or_else(|| {
            Error::VerificationFailed(format!(
                "residual bound {} above tolerance",
                last.map(|b| to_decimal(&b)).unwrap_or_else(|| "n/a".into())
            ))
        })?
    };
    if result.x == result.y || !s.contains_difference(&result.x, &result.y)? {
        return Err(Error::VerificationFailed("x - y is not a nonzero element of S".into()));
    }
    Ok(result)
}

fn check_positive(kappa: &[Rational], x: &[Rational], y: &[Rational]) -> Result<()> {
    if kappa.iter().chain(x).chain(y).all(|q| q.cmp0().is_gt()) {
        Ok(())
    } else {
        Err(Error::VerificationFailed("non-positive coordinate in counterexample".into()))
    }
}
