//! Brute-force cross-checks for the decision procedures: a randomized
//! search for violations of injectivity, Leibniz and cofactor
//! determinants, sign sets by exhaustive feasibility and Fourier–Motzkin
//! elimination. None of these are used to reach a verdict.

mod sampling;

use std::collections::BTreeMap;
use std::collections::BTreeSet;

pub use sampling::{sampled_injectivity_search, SearchReport, Violation};

use crate::error::{Error, Result};
use crate::feasibility::{solve_strict, StrictSystem};
use crate::injectivity::{DetTerm, SymbolicDetPoly};
use crate::linalg::{IndexSet, Rational, RationalMatrix};
use crate::sign::{SignVector, SignVectorSet};

pub const MAX_LEIBNIZ: usize = 5;
pub const MAX_COFACTOR: usize = 6;
pub const MAX_BRUTE_FORCE: usize = 8;
pub const MAX_FOURIER_MOTZKIN: usize = 6;

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_determinant(m: &RationalMatrix) -> Result<Rational> {
    if m.rows() != m.cols() {
        return Err(Error::ShapeMismatch(format!("{}x{} is not square", m.rows(), m.cols())));
    }
    if m.rows() > MAX_COFACTOR {
        return Err(Error::TooLarge(format!("cofactor expansion of size {}", m.rows())));
    }
    Ok(laplace(m))
}

fn laplace(m: &RationalMatrix) -> Rational {
    let n = m.rows();
    if n == 0 {
        return Rational::from(1);
    }
    let rows: Vec<usize> = (1..n).collect();
    let mut det = Rational::new();
    for j in 0..n {
        if m[(0, j)].cmp0().is_eq() {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|&k| k != j).collect();
        let term = Rational::from(&m[(0, j)] * laplace(&m.select(&rows, &cols)));
        if j % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

/// Monomial `kappa^a lambda^b` with exponents as sorted index multisets.
type Monomial = (Vec<usize>, Vec<usize>);
type Poly = BTreeMap<Monomial, Rational>;

fn poly_mul(p: &Poly, q: &Poly) -> Poly {
    let mut out = Poly::new();
    for ((ka, la), ca) in p {
        for ((kb, lb), cb) in q {
            let mut k: Vec<usize> = ka.iter().chain(kb).copied().collect();
            let mut l: Vec<usize> = la.iter().chain(lb).copied().collect();
            k.sort_unstable();
            l.sort_unstable();
            *out.entry((k, l)).or_default() += Rational::from(ca * cb);
        }
    }
    out.retain(|_, c| c.cmp0().is_ne());
    out
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<(Vec<usize>, bool)>) {
        let n = used.len();
        if prefix.len() == n {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| prefix[i] > prefix[j])
                .count();
            out.push((prefix.clone(), inversions % 2 == 1));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// `det Γ` for `Γ = [Z; A' diag(kappa) B diag(lambda)]` expanded over all
/// permutations with symbolic entries.
pub fn naive_symbolic_gamma_det(
    aprime: &RationalMatrix,
    b: &RationalMatrix,
    z: Option<&RationalMatrix>,
) -> Result<SymbolicDetPoly> {
    let (s, r, n) = (aprime.rows(), aprime.cols(), b.cols());
    if n > MAX_LEIBNIZ {
        return Err(Error::TooLarge(format!("Leibniz expansion with n = {n}")));
    }
    if b.rows() != r || s > n {
        return Err(Error::ShapeMismatch("A' and B do not fit".into()));
    }
    let zrows = z.map_or(0, RationalMatrix::rows);
    if zrows + s != n || z.is_some_and(|z| z.cols() != n) {
        return Err(Error::ShapeMismatch("Z and A' do not stack to a square matrix".into()));
    }

    let entry = |row: usize, col: usize| -> Poly {
        let mut p = Poly::new();
        if row < zrows {
            let c = z.expect("rows")[(row, col)].clone();
            if c.cmp0().is_ne() {
                p.insert((vec![], vec![]), c);
            }
        } else {
            let a = row - zrows;
            for j in 0..r {
                let c = Rational::from(&aprime[(a, j)] * &b[(j, col)]);
                if c.cmp0().is_ne() {
                    p.insert((vec![j], vec![col]), c);
                }
            }
        }
        p
    };
    let table: Vec<Vec<Poly>> = (0..n).map(|i| (0..n).map(|j| entry(i, j)).collect()).collect();

    let mut total = Poly::new();
    for (perm, odd) in permutations(n) {
        let mut prod = Poly::from([((vec![], vec![]), Rational::from(1))]);
        for (i, &j) in perm.iter().enumerate() {
            prod = poly_mul(&prod, &table[i][j]);
            if prod.is_empty() {
                break;
            }
        }
        for (mono, c) in prod {
            let e = total.entry(mono).or_default();
            if odd {
                *e -= c;
            } else {
                *e += c;
            }
        }
    }

    let mut terms = Vec::new();
    for ((k, l), coeff) in total {
        if coeff.cmp0().is_eq() {
            continue;
        }
        let kappa = IndexSet::new(k, r).map_err(|_| {
            Error::Internal("a squared kappa survives in det Γ".into())
        })?;
        let lambda = IndexSet::new(l, n)?;
        terms.push(DetTerm { lambda, kappa, coeff });
    }
    Ok(SymbolicDetPoly::from_terms(terms))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignSetMode {
    /// `σ(ker M)`.
    Kernel,
    /// `σ(im M)`.
    Image,
}

/// The sign set by testing each of the `3^k` candidates with an exact
/// feasibility problem.
pub fn brute_force_sign_set(m: &RationalMatrix, mode: SignSetMode) -> Result<SignVectorSet> {
    let ground = match mode {
        SignSetMode::Kernel => m.cols(),
        SignSetMode::Image => m.rows(),
    };
    if ground == 0 {
        return Err(Error::Invalid("empty ground set".into()));
    }
    if ground > MAX_BRUTE_FORCE {
        return Err(Error::TooLarge(format!(
            "3^{ground} sign vectors (limit {MAX_BRUTE_FORCE} coordinates)"
        )));
    }
    let mut out = SignVectorSet::new(ground);
    for rho in SignVector::all(ground) {
        let sys = match mode {
            SignSetMode::Kernel => {
                let mut sys = StrictSystem::with_signs(&rho);
                sys.add_equalities_at(m, 0)?;
                sys
            }
            SignSetMode::Image => {
                let mut sys = StrictSystem::new(m.cols());
                sys.add_linear_signs_at(m, &rho, 0)?;
                sys
            }
        };
        if solve_strict(&sys)?.is_feasible() {
            out.insert(rho)?;
        }
    }
    Ok(out)
}

/// Feasibility of the homogeneous strict system by substituting out the
/// equalities and eliminating variables one at a time.
pub fn fourier_motzkin_feasible(sys: &StrictSystem) -> Result<bool> {
    let nv = sys.num_vars();
    if nv > MAX_FOURIER_MOTZKIN {
        return Err(Error::TooLarge(format!("Fourier–Motzkin on {nv} variables")));
    }
    let (mut eqs, mut ineqs) = sys.relaxation();

    while let Some(e) = eqs.pop() {
        let Some(k) = e.iter().position(|c| c.cmp0().is_ne()) else {
            continue;
        };
        let sub = |row: &mut Vec<Rational>| {
            if row[k].cmp0().is_eq() {
                return;
            }
            let f = Rational::from(&row[k] / &e[k]);
            for (ri, ei) in row.iter_mut().zip(&e) {
                *ri -= Rational::from(&f * ei);
            }
        };
        eqs.iter_mut().for_each(sub);
        ineqs.iter_mut().for_each(sub);
    }

    let normalize = |row: Vec<Rational>| -> Option<Vec<Rational>> {
        let lead = row.iter().find(|c| c.cmp0().is_ne())?.clone().abs();
        Some(row.into_iter().map(|c| c / &lead).collect())
    };
    let mut rows: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for row in ineqs {
        match normalize(row) {
            Some(r) => {
                rows.insert(r);
            }
            // 0 > 0
            None => return Ok(false),
        }
    }
    for k in 0..nv {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), BTreeSet::new());
        for row in rows {
            match row[k].cmp0() {
                std::cmp::Ordering::Greater => pos.push(row),
                std::cmp::Ordering::Less => neg.push(row),
                std::cmp::Ordering::Equal => {
                    rest.insert(row);
                }
            }
        }
        for p in &pos {
            for q in &neg {
                let (a, b) = (Rational::from(-&q[k]), p[k].clone());
                let combined: Vec<Rational> = p
                    .iter()
                    .zip(q)
                    .map(|(x, y)| Rational::from(&a * x) + Rational::from(&b * y))
                    .collect();
                match normalize(combined) {
                    Some(r) => {
                        rest.insert(r);
                    }
                    None => return Ok(false),
                }
            }
        }
        rows = rest;
    }
    Ok(rows.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::injectivity::gamma_det_poly;
    use crate::linalg::determinant;
    use crate::matroid::{covectors, matroid_vectors};

    fn m(rows: &[&[i64]]) -> RationalMatrix {
        RationalMatrix::from_ints(rows)
    }

    #[test]
    fn cofactor_matches_bareiss() {
        let a = m(&[&[2, -1, 0, 3], &[1, 1, 4, -2], &[0, 5, -3, 1], &[7, 0, 1, 1]]);
        assert_eq!(cofactor_determinant(&a).unwrap(), determinant(&a).unwrap());
        assert_eq!(cofactor_determinant(&RationalMatrix::zeros(0, 0)).unwrap(), 1);
    }

    #[test]
    fn leibniz_matches_closed_form() {
        let a = m(&[&[1, -1]]);
        let b = m(&[&[2], &[1]]);
        assert_eq!(naive_symbolic_gamma_det(&a, &b, None).unwrap(), gamma_det_poly(&a, &b, None).unwrap());

        let a = m(&[&[1]]);
        let b = m(&[&[1, 2]]);
        let z = m(&[&[1, 1]]);
        assert_eq!(
            naive_symbolic_gamma_det(&a, &b, Some(&z)).unwrap(),
            gamma_det_poly(&a, &b, Some(&z)).unwrap()
        );

        let a = m(&[&[1, 0, 2], &[0, 1, -1]]);
        let b = m(&[&[1, 2, 0], &[0, 1, 1], &[3, 0, 1]]);
        let z = m(&[&[1, -1, 2]]);
        assert_eq!(
            naive_symbolic_gamma_det(&a, &b, Some(&z)).unwrap(),
            gamma_det_poly(&a, &b, Some(&z)).unwrap()
        );
        assert!(naive_symbolic_gamma_det(&RationalMatrix::zeros(1, 2), &b.select(&[0, 1], &[0]), None)
            .unwrap()
            .is_zero());
    }

    #[test]
    fn brute_force_sign_sets() {
        let row = m(&[&[1, -1]]);
        let k = brute_force_sign_set(&row, SignSetMode::Kernel).unwrap();
        let expect = SignVectorSet::from_vectors(2, ["00", "++", "--"].iter().map(|s| s.parse().unwrap())).unwrap();
        assert_eq!(k, expect);
        assert_eq!(brute_force_sign_set(&RationalMatrix::identity(2), SignSetMode::Image).unwrap().len(), 9);

        let a = m(&[&[1, 0, 1], &[0, 1, 1]]);
        assert_eq!(brute_force_sign_set(&a.transpose(), SignSetMode::Image).unwrap(), covectors(&a).unwrap().into_set());
        assert_eq!(brute_force_sign_set(&a, SignSetMode::Kernel).unwrap(), matroid_vectors(&a).into_set());
    }

    #[test]
    fn fourier_motzkin_examples() {
        let mut sys = StrictSystem::with_signs(&"++".parse().unwrap());
        sys.add_equality(vec![Rational::from(1), Rational::from(-1)]).unwrap();
        assert!(fourier_motzkin_feasible(&sys).unwrap());
        let mut sys = StrictSystem::with_signs(&"+-".parse().unwrap());
        sys.add_equality(vec![Rational::from(1), Rational::from(-1)]).unwrap();
        assert!(!fourier_motzkin_feasible(&sys).unwrap());
        let mut sys = StrictSystem::with_signs(&"+0".parse().unwrap());
        sys.add_equality(vec![Rational::from(1), Rational::from(3)]).unwrap();
        assert!(!fourier_motzkin_feasible(&sys).unwrap());
    }
}
