//! Outward-rounded interval arithmetic on MPFR floats, used to evaluate
//! `f_k(x) = A diag(k) x^B` when the exponents are not integers and to
//! bound residuals of counterexamples.

use rug::float::Round;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;

pub const DEFAULT_PRECISION: u32 = 256;
pub const RETRY_PRECISION: u32 = 1024;

/// Digits used when rendering high-precision values as decimals.
pub const DECIMAL_DIGITS: usize = 50;

/// Closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

impl Interval {
    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        Interval {
            lo: Float::with_val_round(prec, q, Round::Down).0,
            hi: Float::with_val_round(prec, q, Round::Up).0,
        }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    fn prec(&self) -> u32 {
        self.lo.prec()
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn add(&self, o: &Interval) -> Interval {
        let p = self.prec();
        Interval {
            lo: Float::with_val_round(p, &self.lo + &o.lo, Round::Down).0,
            hi: Float::with_val_round(p, &self.hi + &o.hi, Round::Up).0,
        }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        let p = self.prec();
        Interval {
            lo: Float::with_val_round(p, &self.lo - &o.hi, Round::Down).0,
            hi: Float::with_val_round(p, &self.hi - &o.lo, Round::Up).0,
        }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let p = self.prec();
        let pairs = [(&self.lo, &o.lo), (&self.lo, &o.hi), (&self.hi, &o.lo), (&self.hi, &o.hi)];
        let lo = pairs
            .iter()
            .map(|(a, b)| Float::with_val_round(p, *a * *b, Round::Down).0)
            .reduce(|a, b| if b < a { b } else { a })
            .expect("four products");
        let hi = pairs
            .iter()
            .map(|(a, b)| Float::with_val_round(p, *a * *b, Round::Up).0)
            .reduce(|a, b| if b > a { b } else { a })
            .expect("four products");
        Interval { lo, hi }
    }

    pub fn exp(&self) -> Interval {
        let mut lo = self.lo.clone();
        lo.exp_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.exp_round(Round::Up);
        Interval { lo, hi }
    }

    /// Natural logarithm; the interval must be strictly positive.
    pub fn ln(&self) -> Result<Interval> {
        if self.lo <= 0 {
            return Err(Error::NonPositiveInput("logarithm of a non-positive interval".into()));
        }
        let mut lo = self.lo.clone();
        lo.ln_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.ln_round(Round::Up);
        Ok(Interval { lo, hi })
    }

    /// Upper bound on `|v|` over the interval.
    pub fn mag(&self) -> Float {
        let a = Float::with_val(self.prec(), self.lo.abs_ref());
        let b = Float::with_val(self.prec(), self.hi.abs_ref());
        if a > b {
            a
        } else {
            b
        }
    }

    /// Lower bound on `|v|` over the interval.
    pub fn mig(&self) -> Float {
        if self.contains_zero() {
            return Float::with_val(self.prec(), 0);
        }
        let a = Float::with_val(self.prec(), self.lo.abs_ref());
        let b = Float::with_val(self.prec(), self.hi.abs_ref());
        if a < b {
            a
        } else {
            b
        }
    }

    pub fn midpoint(&self) -> Float {
        Float::with_val(self.prec() + 1, &self.lo + &self.hi) / 2u32
    }

    /// Midpoint rounded to an exact rational.
    pub fn midpoint_rational(&self) -> Rational {
        self.midpoint().to_rational().expect("finite interval")
    }
}

pub fn to_decimal(f: &Float) -> String {
    f.to_string_radix(10, Some(DECIMAL_DIGITS))
}

pub fn rational_to_decimal(q: &Rational) -> String {
    let f = Float::with_val(DEFAULT_PRECISION, q);
    to_decimal(&f)
}

/// `x^B`: entry `j` is `prod_i x_i^{b_ji}`. Exact when `B` is integral.
pub fn monomials_exact(b: &RationalMatrix, x: &[Rational]) -> Option<Vec<Rational>> {
    if !b.is_integral() {
        return None;
    }
    Some(
        (0..b.rows())
            .map(|j| {
                let mut m = Rational::from(1);
                for (e, xi) in b.row(j).iter().zip(x) {
                    let k = e.numer().to_i32().expect("exponent fits in i32");
                    if k != 0 {
                        m *= Rational::from(rug::ops::Pow::pow(xi, k));
                    }
                }
                m
            })
            .collect(),
    )
}

/// `x^B` as intervals, via `exp(sum_i b_ji ln x_i)` for non-integral rows.
pub fn monomials_interval(b: &RationalMatrix, x: &[Rational], prec: u32) -> Result<Vec<Interval>> {
    if let Some(exact) = monomials_exact(b, x) {
        return Ok(exact.iter().map(|q| Interval::from_rational(q, prec)).collect());
    }
    let logs: Vec<Interval> = x
        .iter()
        .map(|xi| Interval::from_rational(xi, prec).ln())
        .collect::<Result<_>>()?;
    Ok((0..b.rows())
        .map(|j| {
            let mut s = Interval::from_rational(&Rational::new(), prec);
            for (e, l) in b.row(j).iter().zip(&logs) {
                if e.cmp0().is_ne() {
                    s = s.add(&Interval::from_rational(e, prec).mul(l));
                }
            }
            s.exp()
        })
        .collect())
}

fn check_map_input(
    a: &RationalMatrix,
    b: &RationalMatrix,
    kappa: &[Rational],
    x: &[Rational],
) -> Result<()> {
    if a.cols() != b.rows() || kappa.len() != a.cols() || x.len() != b.cols() {
        return Err(Error::ShapeMismatch(format!(
            "A {}x{}, B {}x{}, kappa {}, x {}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols(),
            kappa.len(),
            x.len()
        )));
    }
    if kappa.iter().any(|k| k.cmp0().is_le()) {
        return Err(Error::NonPositiveInput("kappa must be positive".into()));
    }
    if x.iter().any(|v| v.cmp0().is_le()) {
        return Err(Error::NonPositiveInput("x must be positive".into()));
    }
    Ok(())
}

/// `A diag(kappa) x^B` exactly, when `B` is integral.
pub fn evaluate_map_exact(
    a: &RationalMatrix,
    b: &RationalMatrix,
    kappa: &[Rational],
    x: &[Rational],
) -> Result<Option<Vec<Rational>>> {
    check_map_input(a, b, kappa, x)?;
    let Some(m) = monomials_exact(b, x) else {
        return Ok(None);
    };
    let km: Vec<Rational> = kappa.iter().zip(&m).map(|(k, v)| Rational::from(k * v)).collect();
    Ok(Some(a.mul_vec(&km)?))
}

/// `A diag(kappa) x^B` as enclosing intervals at `prec` bits.
pub fn evaluate_map(
    a: &RationalMatrix,
    b: &RationalMatrix,
    kappa: &[Rational],
    x: &[Rational],
    prec: u32,
) -> Result<Vec<Interval>> {
    check_map_input(a, b, kappa, x)?;
    let m = monomials_interval(b, x, prec)?;
    let km: Vec<Interval> = kappa
        .iter()
        .zip(&m)
        .map(|(k, v)| Interval::from_rational(k, prec).mul(v))
        .collect();
    Ok((0..a.rows())
        .map(|i| {
            let mut s = Interval::from_rational(&Rational::new(), prec);
            for (aij, v) in a.row(i).iter().zip(&km) {
                if aij.cmp0().is_ne() {
                    s = s.add(&Interval::from_rational(aij, prec).mul(v));
                }
            }
            s
        })
        .collect())
}

/// Rigorous upper bound on `‖f(x) - f(y)‖∞ / max(‖f(x)‖∞, 1)`.
pub fn relative_residual_bound(fx: &[Interval], fy: &[Interval], prec: u32) -> Float {
    let mut num = Float::with_val(prec, 0);
    let mut den = Float::with_val(prec, 1);
    for (a, b) in fx.iter().zip(fy) {
        let d = a.sub(b).mag();
        if d > num {
            num = d;
        }
        let lower = a.mig();
        if lower > den {
            den = lower;
        }
    }
    Float::with_val_round(prec, &num / &den, Round::Up).0
}
