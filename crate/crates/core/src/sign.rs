//! Sign vectors over `{-, 0, +}` and the operations the decision
//! procedures need: componentwise sign, orthogonality, composition.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use rug::Rational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// One of `-`, `0`, `+`. The derived order is `- < 0 < +`, which is the
/// canonical order used for every sorted collection in this crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn of(q: &Rational) -> Sign {
        match q.cmp0() {
            std::cmp::Ordering::Less => Sign::Minus,
            std::cmp::Ordering::Equal => Sign::Zero,
            std::cmp::Ordering::Greater => Sign::Plus,
        }
    }

    pub fn of_i32(v: i32) -> Sign {
        match v.signum() {
            -1 => Sign::Minus,
            0 => Sign::Zero,
            _ => Sign::Plus,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sign::Zero
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Zero => '0',
            Sign::Plus => '+',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '-' | '−' => Some(Sign::Minus),
            '0' => Some(Sign::Zero),
            '+' => Some(Sign::Plus),
            _ => None,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
            Sign::Plus => Sign::Minus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::of_i32(self.to_i32() * rhs.to_i32())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An element of `{-, 0, +}^n` with `n >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignVector(Vec<Sign>);

impl SignVector {
    pub fn new(signs: Vec<Sign>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidSignVector("empty sign vector".into()));
        }
        Ok(SignVector(signs))
    }

    pub fn zero(n: usize) -> Self {
        assert!(n > 0, "sign vectors have positive length");
        SignVector(vec![Sign::Zero; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Sign {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|s| s.is_zero())
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.0[i].is_zero()).collect()
    }

    pub fn negated(&self) -> SignVector {
        SignVector(self.0.iter().map(|&s| -s).collect())
    }

    /// Enumerates all `3^n` sign vectors of length `n` in canonical order.
    pub fn all(n: usize) -> impl Iterator<Item = SignVector> {
        assert!(n > 0 && n < 40);
        let total = 3usize.pow(n as u32);
        (0..total).map(move |mut k| {
            let mut v = vec![Sign::Minus; n];
            for slot in v.iter_mut().rev() {
                *slot = match k % 3 {
                    0 => Sign::Minus,
                    1 => Sign::Zero,
                    _ => Sign::Plus,
                };
                k /= 3;
            }
            SignVector(v)
        })
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for SignVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let signs = s
            .trim()
            .chars()
            .map(|c| {
                Sign::from_char(c)
                    .ok_or_else(|| Error::InvalidSignVector(format!("bad character {c:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SignVector::new(signs)
    }
}

impl Serialize for SignVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for SignVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Canonically ordered set of distinct sign vectors sharing one length.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SignVectorSet {
    len: usize,
    members: BTreeSet<SignVector>,
}

impl SignVectorSet {
    pub fn new(len: usize) -> Self {
        SignVectorSet {
            len,
            members: BTreeSet::new(),
        }
    }

    pub fn from_vectors(len: usize, vs: impl IntoIterator<Item = SignVector>) -> Result<Self> {
        let mut set = SignVectorSet::new(len);
        for v in vs {
            set.insert(v)?;
        }
        Ok(set)
    }

    pub fn ground_len(&self) -> usize {
        self.len
    }

    /// Returns true if the vector was not already present.
    pub fn insert(&mut self, v: SignVector) -> Result<bool> {
        if v.len() != self.len {
            return Err(Error::LengthMismatch(self.len, v.len()));
        }
        Ok(self.members.insert(v))
    }

    pub fn contains(&self, v: &SignVector) -> bool {
        self.members.contains(v)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &SignVector> {
        self.members.iter()
    }

    pub fn intersection(&self, other: &SignVectorSet) -> SignVectorSet {
        SignVectorSet {
            len: self.len,
            members: self.members.intersection(&other.members).cloned().collect(),
        }
    }

    pub fn without_zero(&self) -> SignVectorSet {
        SignVectorSet {
            len: self.len,
            members: self.members.iter().filter(|v| !v.is_zero()).cloned().collect(),
        }
    }

    /// True iff the set is exactly `{0}`.
    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1 && self.members.iter().all(|v| v.is_zero())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.members.iter().map(|v| v.to_string()).collect()
    }
}

impl<'a> IntoIterator for &'a SignVectorSet {
    type Item = &'a SignVector;
    type IntoIter = std::collections::btree_set::Iter<'a, SignVector>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

impl Serialize for SignVectorSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.members.iter())
    }
}

/// Componentwise sign of a rational vector.
pub fn sigma(x: &[Rational]) -> Result<SignVector> {
    SignVector::new(x.iter().map(Sign::of).collect())
}

/// Sign-vector orthogonality: either all products vanish, or both a `+`
/// and a `-` product occur.
pub fn orthogonal(mu: &SignVector, nu: &SignVector) -> Result<bool> {
    if mu.len() != nu.len() {
        return Err(Error::LengthMismatch(mu.len(), nu.len()));
    }
    let mut pos = false;
    let mut neg = false;
    for (&a, &b) in mu.signs().iter().zip(nu.signs()) {
        match a * b {
            Sign::Plus => pos = true,
            Sign::Minus => neg = true,
            Sign::Zero => {}
        }
    }
    Ok(pos == neg)
}

/// `(u ∘ v)_i = u_i` if `u_i != 0`, else `v_i`.
pub fn compose(u: &SignVector, v: &SignVector) -> Result<SignVector> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    Ok(SignVector(
        u.signs()
            .iter()
            .zip(v.signs())
            .map(|(&a, &b)| if a.is_zero() { b } else { a })
            .collect(),
    ))
}

/// A point with entries in `{-1, 0, 1}` whose sign vector is `tau`.
pub fn orthant_feasible_point(tau: &SignVector) -> Vec<Rational> {
    tau.signs()
        .iter()
        .map(|s| Rational::from(s.to_i32()))
        .collect()
}
