use rug::{Integer, Rational};

use super::matrix::{IndexSet, RationalMatrix};
use crate::error::{Error, Result};
use crate::sign::Sign;

/// Scales each row by the lcm of its denominators. Returns the integer rows
/// and the product of the scale factors.
fn integer_rows(m: &RationalMatrix) -> (Vec<Vec<Integer>>, Integer) {
    let mut scale = Integer::from(1);
    let rows = (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let l = row
                .iter()
                .fold(Integer::from(1), |acc, q| acc.lcm(q.denom()));
            let out = row
                .iter()
                .map(|q| q.numer() * Integer::from(&l / q.denom()))
                .collect();
            scale *= &l;
            out
        })
        .collect();
    (rows, scale)
}

/// Fraction-free forward elimination in place. Returns the pivot columns and
/// the parity of row swaps. Every division is exact.
fn bareiss_forward(a: &mut [Vec<Integer>], cols: usize) -> (Vec<usize>, bool) {
    let rows = a.len();
    let mut prev = Integer::from(1);
    let mut r = 0;
    let mut pivots = Vec::new();
    let mut odd = false;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            odd = !odd;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let t = Integer::from(&a[i][j] * &a[r][c]) - Integer::from(&a[i][c] * &a[r][j]);
                a[i][j] = t.div_exact(&prev);
            }
            a[i][c] = Integer::new();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (pivots, odd)
}

pub fn rank(m: &RationalMatrix) -> usize {
    let (mut a, _) = integer_rows(m);
    bareiss_forward(&mut a, m.cols()).0.len()
}

/// Determinant of a square matrix via Bareiss elimination.
pub fn determinant(m: &RationalMatrix) -> Result<Rational> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::SizeMismatch(format!(
            "determinant of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if n == 0 {
        return Ok(Rational::from(1));
    }
    let (mut a, scale) = integer_rows(m);
    let (pivots, odd) = bareiss_forward(&mut a, n);
    if pivots.len() < n {
        return Ok(Rational::new());
    }
    let mut det = Rational::from((a[n - 1][n - 1].clone(), scale));
    if odd {
        det = -det;
    }
    Ok(det)
}

/// `det(M[I, J])` for index sets of equal size.
pub fn minor(m: &RationalMatrix, rows: &IndexSet, cols: &IndexSet) -> Result<Rational> {
    if rows.len() != cols.len() {
        return Err(Error::SizeMismatch(format!(
            "row set of size {} against column set of size {}",
            rows.len(),
            cols.len()
        )));
    }
    if rows.ground() != m.rows() || cols.ground() != m.cols() {
        return Err(Error::InvalidIndexSet(format!(
            "index sets over [{}]x[{}] for a {}x{} matrix",
            rows.ground(),
            cols.ground(),
            m.rows(),
            m.cols()
        )));
    }
    determinant(&m.select(rows.as_slice(), cols.as_slice()))
}

/// Reduced row-echelon form and pivot columns.
pub fn rref(m: &RationalMatrix) -> (RationalMatrix, Vec<usize>) {
    let mut a = m.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[(i, c)].cmp0().is_ne()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                let tmp = a[(p, j)].clone();
                a[(p, j)] = a[(r, j)].clone();
                a[(r, j)] = tmp;
            }
        }
        let inv = Rational::from(a[(r, c)].recip_ref());
        for j in c..cols {
            a[(r, j)] *= &inv;
        }
        for i in 0..rows {
            if i == r || a[(i, c)].cmp0().is_eq() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                let t = Rational::from(&f * &a[(r, j)]);
                a[(i, j)] -= t;
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

/// Multiplies by the lcm of denominators and divides by the gcd of
/// numerators. Preserves the sign pattern.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<Rational> {
    let l = v.iter().fold(Integer::from(1), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<Integer> = v
        .iter()
        .map(|q| q.numer() * Integer::from(&l / q.denom()))
        .collect();
    let g = ints.iter().fold(Integer::new(), |acc, x| acc.gcd(x));
    if g == 0 {
        return v.to_vec();
    }
    ints.into_iter()
        .map(|x| Rational::from(x.div_exact(&g)))
        .collect()
}

/// Basis of `ker M` as the columns of the result (`cols(M) - rank(M)`
/// columns, possibly zero). Each column is a primitive integer vector with
/// its free coordinate positive.
pub fn kernel_basis(m: &RationalMatrix) -> RationalMatrix {
    let n = m.cols();
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let columns: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::new(); n];
            v[f] = Rational::from(1);
            for (k, &p) in pivots.iter().enumerate() {
                v[p] = Rational::from(-&r[(k, f)]);
            }
            primitive_integer_vector(&v)
        })
        .collect();
    RationalMatrix::from_columns(n, &columns).expect("kernel columns have length cols(M)")
}

/// The nonzero rows of the reduced row-echelon form; same kernel as `m`.
pub fn row_basis(m: &RationalMatrix) -> RationalMatrix {
    let (r, pivots) = rref(m);
    let idx: Vec<usize> = (0..pivots.len()).collect();
    r.select_rows(&idx)
}

/// The pivot columns of `m`, a basis of `im(M)` made of original columns.
pub fn column_basis(m: &RationalMatrix) -> RationalMatrix {
    let (_, pivots) = rref(m);
    m.select_cols(&pivots)
}

/// Sign of the permutation sending `1..n` to `(sorted I^c, sorted I)`.
pub fn permutation_sign_tau(i: &IndexSet) -> Sign {
    let inside = i.as_slice();
    let inversions: usize = (0..i.ground())
        .filter(|&j| !i.contains(j))
        .map(|j| inside.iter().filter(|&&k| k < j).count())
        .sum();
    if inversions.is_multiple_of(2) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}
