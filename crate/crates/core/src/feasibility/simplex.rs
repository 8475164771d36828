//! Phase-one simplex over exact rationals with Bland's rule.

use rug::Rational;

/// Finds `w >= 0` with `A w = b`, or `None` if no such `w` exists.
///
/// Every row gets an artificial variable; the sum of artificials is
/// minimized with Bland's anticycling rule, and artificials never re-enter
/// once they leave the basis.
pub fn phase_one(a: &[Vec<Rational>], b: &[Rational], cols: usize) -> Option<Vec<Rational>> {
    let m = a.len();
    debug_assert_eq!(b.len(), m);
    let width = cols + m + 1;
    let rhs = cols + m;

    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(m);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        let flip = bi.cmp0().is_lt();
        let mut r = vec![Rational::new(); width];
        for (j, v) in row.iter().enumerate() {
            if v.cmp0().is_ne() {
                r[j] = if flip { Rational::from(-v) } else { v.clone() };
            }
        }
        r[cols + i] = Rational::from(1);
        r[rhs] = if flip { Rational::from(-bi) } else { bi.clone() };
        t.push(r);
    }
    let mut basis: Vec<usize> = (cols..cols + m).collect();

    // Reduced costs of the phase-one objective (sum of artificials).
    let mut obj = vec![Rational::new(); width];
    for r in &t {
        for j in 0..cols {
            if r[j].cmp0().is_ne() {
                obj[j] -= &r[j];
            }
        }
        obj[rhs] -= &r[rhs];
    }

    while let Some(enter) = (0..cols).find(|&j| obj[j].cmp0().is_lt()) {
        let mut leave: Option<(usize, Rational)> = None;
        for (i, r) in t.iter().enumerate() {
            if r[enter].cmp0().is_gt() {
                let ratio = Rational::from(&r[rhs] / &r[enter]);
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((pr, _)) = leave else {
            // Unbounded direction; cannot happen for a bounded-below
            // phase-one objective.
            unreachable!("phase-one objective is bounded below by zero");
        };
        pivot(&mut t, &mut obj, pr, enter);
        basis[pr] = enter;
    }

    if obj[rhs].cmp0().is_ne() {
        return None;
    }
    let mut w = vec![Rational::new(); cols];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < cols {
            w[bv] = t[i][rhs].clone();
        }
    }
    Some(w)
}

fn pivot(t: &mut [Vec<Rational>], obj: &mut [Rational], pr: usize, pc: usize) {
    let width = obj.len();
    let inv = Rational::from(t[pr][pc].recip_ref());
    for v in t[pr].iter_mut() {
        if v.cmp0().is_ne() {
            *v *= &inv;
        }
    }
    let prow = t[pr].clone();
    let nonzero: Vec<usize> = (0..width).filter(|&j| prow[j].cmp0().is_ne()).collect();
    let eliminate = |row: &mut [Rational]| {
        let f = row[pc].clone();
        if f.cmp0().is_eq() {
            return;
        }
        for &j in &nonzero {
            let d = Rational::from(&f * &prow[j]);
            row[j] -= d;
        }
    };
    for (i, row) in t.iter_mut().enumerate() {
        if i != pr {
            eliminate(row);
        }
    }
    eliminate(obj);
}
