//! Randomized search for `x != y` with `x - y ∈ S` and
//! `f_kappa(x) = f_kappa(y)`.
//!
//! Samples are drawn in double precision and ranked by relative image gap.
//! The best few have `ln y` polished by Levenberg–Marquardt, then `kappa`
//! is replaced by its exact projection onto `ker(A diag(x^B - y^B))`. A
//! violation is reported only if that projection is positive and the
//! residual bound at 256 (or 1024) bits is below the engine's tolerance.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rug::Float;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::injectivity::{residual_tolerance, SubsetSpec};
use crate::io::format_rationals;
use crate::linalg::{kernel_basis, rref, Rational, RationalMatrix};
use crate::numeric::{
    evaluate_map, monomials_exact, monomials_interval, rational_to_decimal, relative_residual_bound,
    to_decimal, DEFAULT_PRECISION, RETRY_PRECISION,
};
use crate::sign::SignVector;

const SHARD: usize = 1000;
const CANDIDATES: usize = 8;
const POLISH_STEPS: usize = 40;
/// Minimum `‖x - y‖∞ / max(‖x‖∞, ‖y‖∞)` for a pair to count.
const SEPARATION: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct Violation {
    pub kappa: Vec<Rational>,
    pub x: Vec<Rational>,
    pub y: Vec<Rational>,
    /// Rigorous bound on the relative image gap.
    pub gap: Float,
}

impl Serialize for Violation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let dec = |v: &[Rational]| -> Vec<String> { v.iter().map(rational_to_decimal).collect() };
        let mut st = s.serialize_struct("Violation", 7)?;
        st.serialize_field("kappa", &dec(&self.kappa))?;
        st.serialize_field("x", &dec(&self.x))?;
        st.serialize_field("y", &dec(&self.y))?;
        st.serialize_field("kappa_exact", &format_rationals(&self.kappa))?;
        st.serialize_field("x_exact", &format_rationals(&self.x))?;
        st.serialize_field("y_exact", &format_rationals(&self.y))?;
        st.serialize_field("gap", &to_decimal(&self.gap))?;
        st.end()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub samples: usize,
    pub seed: u64,
    pub candidates_checked: usize,
    pub violation: Option<Violation>,
}

/// How differences `x - y` are drawn from `S`.
enum Directions {
    /// `d = C g` for a basis `C`; `g` is the sampled coordinate vector.
    Basis { exact: RationalMatrix, float: DMatrix<f64> },
    /// `d` itself, with sign vector drawn from `T`.
    Orthants(Vec<SignVector>),
}

impl Directions {
    fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            Directions::Basis { float, .. } => (0..float.ncols()).map(|_| rng.sample(StandardNormal)).collect(),
            Directions::Orthants(taus) => {
                let tau = &taus[rng.gen_range(0..taus.len())];
                tau.signs()
                    .iter()
                    .map(|s| s.to_i32() as f64 * rng.gen_range(-1.0f64..1.0).exp())
                    .collect()
            }
        }
    }

    fn to_difference(&self, coords: &[f64]) -> Vec<f64> {
        match self {
            Directions::Basis { float, .. } => (float * DVector::from_column_slice(coords)).as_slice().to_vec(),
            Directions::Orthants(_) => coords.to_vec(),
        }
    }

    fn exact_difference(&self, coords: &[f64]) -> Option<Vec<Rational>> {
        let q: Option<Vec<Rational>> = coords.iter().map(|&c| Rational::from_f64(c)).collect();
        match self {
            Directions::Basis { exact, .. } => exact.mul_vec(&q?).ok(),
            Directions::Orthants(_) => q,
        }
    }
}

struct Model {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl Model {
    fn rates(&self, kappa: &[f64], x: &[f64]) -> DVector<f64> {
        let lx = DVector::from_iterator(x.len(), x.iter().map(|v| v.ln()));
        let m = &self.b * lx;
        DVector::from_iterator(kappa.len(), kappa.iter().zip(m.iter()).map(|(k, e)| k * e.exp()))
    }

    fn eval(&self, kappa: &[f64], x: &[f64]) -> DVector<f64> {
        &self.a * self.rates(kappa, x)
    }

    /// `‖f(x) - f(y)‖∞ / max(‖f(x)‖∞, 1)`.
    fn gap(&self, kappa: &[f64], x: &[f64], y: &[f64]) -> f64 {
        let fx = self.eval(kappa, x);
        let fy = self.eval(kappa, y);
        (&fx - &fy).amax() / fx.amax().max(1.0)
    }

    /// Jacobian of `f(y + d) - f(y)` with respect to `ln y`.
    fn jacobian(&self, kappa: &[f64], x: &[f64], y: &[f64]) -> DMatrix<f64> {
        let n = y.len();
        let rx = self.rates(kappa, x);
        let ry = self.rates(kappa, y);
        let mut jx = self.b.clone();
        let mut jy = self.b.clone();
        for i in 0..n {
            let ratio = y[i] / x[i];
            for j in 0..self.b.nrows() {
                jx[(j, i)] *= rx[j] * ratio;
                jy[(j, i)] *= ry[j];
            }
        }
        &self.a * (jx - jy)
    }

    fn polish(&self, kappa: &[f64], y: &mut Vec<f64>, d: &[f64]) {
        let shifted = |y: &[f64]| -> Option<Vec<f64>> {
            let x: Vec<f64> = y.iter().zip(d).map(|(a, b)| a + b).collect();
            x.iter().all(|v| *v > 0.0 && v.is_finite()).then_some(x)
        };
        let Some(mut x) = shifted(y) else { return };
        let mut res = self.eval(kappa, &x) - self.eval(kappa, y);
        let mut lambda = 1e-3;
        for _ in 0..POLISH_STEPS {
            if res.amax() < 1e-15 {
                break;
            }
            let j = self.jacobian(kappa, &x, y);
            let m = j.nrows();
            let jjt = &j * j.transpose() + DMatrix::identity(m, m) * lambda;
            let Some(w) = jjt.lu().solve(&res) else { break };
            let step = -(j.transpose() * w);
            let trial: Vec<f64> = y.iter().zip(step.iter()).map(|(v, s)| v * s.exp()).collect();
            match shifted(&trial) {
                Some(tx) if trial.iter().all(|v| *v > 0.0 && v.is_finite()) => {
                    let tres = self.eval(kappa, &tx) - self.eval(kappa, &trial);
                    if tres.amax() < res.amax() {
                        *y = trial;
                        x = tx;
                        res = tres;
                        lambda = (lambda / 10.0).max(1e-12);
                        continue;
                    }
                    lambda *= 10.0;
                }
                _ => lambda *= 10.0,
            }
        }
    }
}

struct Candidate {
    gap: f64,
    shard: usize,
    index: usize,
    kappa: Vec<f64>,
    y: Vec<f64>,
    coords: Vec<f64>,
}

fn to_f64(m: &RationalMatrix) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m[(i, j)].to_f64())
}

fn run_shard(model: &Model, dirs: &Directions, r: usize, shard: usize, count: usize, seed: u64) -> Vec<Candidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shard as u64);
    let n = model.b.ncols();
    let mut out: Vec<Candidate> = Vec::new();
    for index in 0..count {
        let kappa: Vec<f64> = (0..r).map(|_| rng.gen_range(-2.0f64..2.0).exp()).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0f64..2.0).exp()).collect();
        let mut coords = dirs.sample(&mut rng);
        let d = dirs.to_difference(&coords);
        let t_max = y
            .iter()
            .zip(&d)
            .filter(|(_, di)| **di < 0.0)
            .map(|(yi, di)| yi / -di)
            .fold(f64::INFINITY, f64::min);
        let t = if t_max.is_finite() {
            rng.gen_range(0.05..0.95) * t_max
        } else {
            rng.gen_range(-2.0f64..2.0).exp()
        };
        coords.iter_mut().for_each(|c| *c *= t);
        let x: Vec<f64> = y.iter().zip(&d).map(|(a, b)| a + t * b).collect();
        let scale = x.iter().chain(&y).fold(0.0f64, |m, v| m.max(v.abs()));
        let sep = x.iter().zip(&y).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if sep.is_nan() || sep < SEPARATION * scale || !x.iter().all(|v| *v > 0.0) {
            continue;
        }
        let gap = model.gap(&kappa, &x, &y);
        if !gap.is_finite() {
            continue;
        }
        out.push(Candidate { gap, shard, index, kappa, y, coords });
        if out.len() > 4 * CANDIDATES {
            sort_candidates(&mut out);
            out.truncate(CANDIDATES);
        }
    }
    sort_candidates(&mut out);
    out.truncate(CANDIDATES);
    out
}

fn sort_candidates(c: &mut [Candidate]) {
    c.sort_by(|p, q| p.gap.total_cmp(&q.gap).then(p.shard.cmp(&q.shard)).then(p.index.cmp(&q.index)));
}

/// Orthogonal projection of `kappa` onto the column span of `k`.
fn project(k: &RationalMatrix, kappa: &[Rational]) -> Result<Vec<Rational>> {
    let kt = k.transpose();
    let gram = kt.mul(k)?;
    let rhs = kt.mul_vec(kappa)?;
    let c = gram.cols();
    let aug = RationalMatrix::from_rows(
        (0..c)
            .map(|i| {
                let mut row = gram.row(i).to_vec();
                row.push(rhs[i].clone());
                row
            })
            .collect(),
    )?;
    let (red, pivots) = rref(&aug);
    if pivots.len() != c || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return Err(Error::Internal("kernel basis is not independent".into()));
    }
    let coeffs: Vec<Rational> = (0..c).map(|i| red[(i, c)].clone()).collect();
    k.mul_vec(&coeffs)
}

fn verify(
    a: &RationalMatrix,
    b: &RationalMatrix,
    dirs: &Directions,
    cand: &Candidate,
) -> Result<Option<Violation>> {
    let Some(d) = dirs.exact_difference(&cand.coords) else { return Ok(None) };
    let y: Option<Vec<Rational>> = cand.y.iter().map(|&v| Rational::from_f64(v)).collect();
    let Some(y) = y else { return Ok(None) };
    let x: Vec<Rational> = y.iter().zip(&d).map(|(p, q)| Rational::from(p + q)).collect();
    if x.iter().chain(&y).any(|v| v.cmp0().is_le()) || d.iter().all(|v| v.cmp0().is_eq()) {
        return Ok(None);
    }
    let diff: Vec<Rational> = match (monomials_exact(b, &x), monomials_exact(b, &y)) {
        (Some(mx), Some(my)) => mx.iter().zip(&my).map(|(p, q)| Rational::from(p - q)).collect(),
        _ => {
            let mx = monomials_interval(b, &x, DEFAULT_PRECISION)?;
            let my = monomials_interval(b, &y, DEFAULT_PRECISION)?;
            mx.iter().zip(&my).map(|(p, q)| p.sub(q).midpoint_rational()).collect()
        }
    };
    let k = kernel_basis(&a.scale_columns(&diff)?);
    if k.cols() == 0 {
        return Ok(None);
    }
    let kappa0: Option<Vec<Rational>> = cand.kappa.iter().map(|&v| Rational::from_f64(v)).collect();
    let Some(kappa0) = kappa0 else { return Ok(None) };
    let kappa = project(&k, &kappa0)?;
    if kappa.iter().any(|v| v.cmp0().is_le()) {
        return Ok(None);
    }
    for prec in [DEFAULT_PRECISION, RETRY_PRECISION] {
        let fx = evaluate_map(a, b, &kappa, &x, prec)?;
        let fy = evaluate_map(a, b, &kappa, &y, prec)?;
        let gap = relative_residual_bound(&fx, &fy, prec);
        if gap <= residual_tolerance(prec) {
            return Ok(Some(Violation { kappa, x, y, gap }));
        }
    }
    Ok(None)
}

/// Draws `samples` triples `(kappa, x, y)` with `x - y ∈ S` and checks the
/// most promising ones rigorously. The report depends only on the inputs
/// and `seed`.
pub fn sampled_injectivity_search(
    a: &RationalMatrix,
    b: &RationalMatrix,
    s: &SubsetSpec,
    samples: usize,
    seed: u64,
) -> Result<SearchReport> {
    let (r, n) = (b.rows(), b.cols());
    if a.cols() != r {
        return Err(Error::ShapeMismatch(format!("A has {} columns but B has {r} rows", a.cols())));
    }
    let dirs = match s {
        SubsetSpec::OrthantUnion(t) => {
            if t.ground_len() != n {
                return Err(Error::ShapeMismatch(format!("T does not live in R^{n}")));
            }
            Directions::Orthants(t.iter().filter(|v| !v.is_zero()).cloned().collect())
        }
        _ => {
            let c = s.basis(n).expect("subspace");
            if c.rows() != n {
                return Err(Error::ShapeMismatch(format!("S does not live in R^{n}")));
            }
            Directions::Basis { float: to_f64(&c), exact: c }
        }
    };
    let empty = match &dirs {
        Directions::Basis { exact, .. } => exact.cols() == 0,
        Directions::Orthants(t) => t.is_empty(),
    };
    if empty || samples == 0 {
        return Ok(SearchReport { samples: 0, seed, candidates_checked: 0, violation: None });
    }

    let model = Model { a: to_f64(a), b: to_f64(b) };
    let shards = samples.div_ceil(SHARD);
    let mut candidates: Vec<Candidate> = (0..shards)
        .into_par_iter()
        .map(|i| {
            let count = SHARD.min(samples - i * SHARD);
            run_shard(&model, &dirs, r, i, count, seed)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    sort_candidates(&mut candidates);
    candidates.truncate(CANDIDATES);

    let mut checked = 0;
    for mut cand in candidates {
        checked += 1;
        let d = dirs.to_difference(&cand.coords);
        model.polish(&cand.kappa, &mut cand.y, &d);
        if let Some(v) = verify(a, b, &dirs, &cand)? {
            return Ok(SearchReport { samples, seed, candidates_checked: checked, violation: Some(v) });
        }
    }
    Ok(SearchReport { samples, seed, candidates_checked: checked, violation: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::injectivity::check_injectivity;

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_ints(rows)
    }

    #[test]
    fn finds_the_quadratic_family() {
        let a = m(&[&[1, -1]]);
        let b = m(&[&[2], &[1]]);
        let rep = sampled_injectivity_search(&a, &b, &SubsetSpec::FullSpace, 200, 7).unwrap();
        let v = rep.violation.expect("violation");
        // k1 x^2 - k2 x = k1 y^2 - k2 y  iff  x + y = k2 / k1
        let sum = Rational::from(&v.x[0] + &v.y[0]);
        assert_eq!(sum, Rational::from(&v.kappa[1] / &v.kappa[0]));
    }

    #[test]
    fn injective_instance_has_no_violation() {
        let a = m(&[&[1, 2, -1], &[0, 1, 3]]);
        let b = a.transpose();
        assert!(check_injectivity(&a, &b, &SubsetSpec::FullSpace).unwrap().injective);
        let rep = sampled_injectivity_search(&a, &b, &SubsetSpec::FullSpace, 2000, 1).unwrap();
        assert!(rep.violation.is_none());
        assert_eq!(rep.samples, 2000);
    }

    #[test]
    fn trivial_subspace_gives_empty_report() {
        let a = m(&[&[1, -1]]);
        let b = m(&[&[2], &[1]]);
        let s = SubsetSpec::Image(RationalMatrix::zeros(1, 1));
        let rep = sampled_injectivity_search(&a, &b, &s, 100, 0).unwrap();
        assert_eq!(rep.samples, 0);
        assert!(rep.violation.is_none());
    }

    #[test]
    fn reports_are_reproducible() {
        let a = m(&[&[1, -1, 1]]);
        let b = m(&[&[0], &[1], &[2]]);
        let r1 = sampled_injectivity_search(&a, &b, &SubsetSpec::FullSpace, 3000, 42).unwrap();
        let r2 = sampled_injectivity_search(&a, &b, &SubsetSpec::FullSpace, 3000, 42).unwrap();
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
        assert!(r1.violation.is_some());
    }
}
