//! Exact feasibility of homogeneous linear systems with strict sign
//! constraints.
//!
//! A system is a set of equalities `E z = 0`, per-variable constraints
//! `z_i > 0`, `z_i < 0`, `z_i = 0` or free, and linear constraints
//! `g · z` with one of the same four constraints. Strict inequalities are
//! relaxed to `>= eps` (by default `eps = 1`); since the solution set is a
//! cone, the relaxation is feasible iff the strict system is.
//!
//! The relaxed system is written as `P z = 0, Q z >= eps`. An infeasible
//! system comes with multipliers `u` (free) and `w >= 0`, `sum(w) = 1`, such
//! that `Pᵀu + Qᵀw = 0`; multiplying out gives `0 >= eps`.

mod simplex;

use rug::Rational;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::io::format_rationals;
use crate::linalg::RationalMatrix;
use crate::sign::{Sign, SignVector};

pub use simplex::phase_one;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    Positive,
    Negative,
    Zero,
    Free,
}

impl Constraint {
    pub fn from_sign(s: Sign) -> Constraint {
        match s {
            Sign::Plus => Constraint::Positive,
            Sign::Minus => Constraint::Negative,
            Sign::Zero => Constraint::Zero,
        }
    }

    fn holds(self, v: &Rational) -> bool {
        match self {
            Constraint::Positive => v.cmp0().is_gt(),
            Constraint::Negative => v.cmp0().is_lt(),
            Constraint::Zero => v.cmp0().is_eq(),
            Constraint::Free => true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct StrictSystem {
    num_vars: usize,
    equalities: Vec<Vec<Rational>>,
    vars: Vec<Constraint>,
    linear: Vec<(Vec<Rational>, Constraint)>,
}

impl StrictSystem {
    /// A system in `num_vars` free variables with no constraints.
    pub fn new(num_vars: usize) -> Self {
        StrictSystem {
            num_vars,
            equalities: Vec::new(),
            vars: vec![Constraint::Free; num_vars],
            linear: Vec::new(),
        }
    }

    /// Variables constrained to the orthant `σ(z) = signs`.
    pub fn with_signs(signs: &SignVector) -> Self {
        let mut sys = Self::new(signs.len());
        sys.vars = signs.signs().iter().map(|&s| Constraint::from_sign(s)).collect();
        sys
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn check_len(&self, row: &[Rational]) -> Result<()> {
        if row.len() != self.num_vars {
            return Err(Error::ShapeMismatch(format!(
                "row of length {} in a system of {} variables",
                row.len(),
                self.num_vars
            )));
        }
        Ok(())
    }

    pub fn constrain_var(&mut self, i: usize, c: Constraint) {
        self.vars[i] = c;
    }

    pub fn add_equality(&mut self, row: Vec<Rational>) -> Result<()> {
        self.check_len(&row)?;
        self.equalities.push(row);
        Ok(())
    }

    /// Adds `M z = 0`, or `M z_{offset..} = 0` when `M` has fewer columns
    /// than the system has variables.
    pub fn add_equalities_at(&mut self, m: &RationalMatrix, offset: usize) -> Result<()> {
        for i in 0..m.rows() {
            self.add_equality(self.embed(m.row(i), offset)?)?;
        }
        Ok(())
    }

    pub fn add_linear(&mut self, row: Vec<Rational>, c: Constraint) -> Result<()> {
        self.check_len(&row)?;
        self.linear.push((row, c));
        Ok(())
    }

    /// Adds `σ(G z_{offset..}) = mu`.
    pub fn add_linear_signs_at(
        &mut self,
        g: &RationalMatrix,
        mu: &SignVector,
        offset: usize,
    ) -> Result<()> {
        if g.rows() != mu.len() {
            return Err(Error::LengthMismatch(g.rows(), mu.len()));
        }
        for i in 0..g.rows() {
            let row = self.embed(g.row(i), offset)?;
            self.add_linear(row, Constraint::from_sign(mu.get(i)))?;
        }
        Ok(())
    }

    fn embed(&self, row: &[Rational], offset: usize) -> Result<Vec<Rational>> {
        if offset + row.len() > self.num_vars {
            return Err(Error::ShapeMismatch(format!(
                "row of length {} at offset {offset} in a system of {} variables",
                row.len(),
                self.num_vars
            )));
        }
        let mut out = vec![Rational::new(); self.num_vars];
        out[offset..offset + row.len()].clone_from_slice(row);
        Ok(out)
    }

    /// True iff `z` satisfies every original (strict) constraint exactly.
    pub fn is_satisfied_by(&self, z: &[Rational]) -> bool {
        z.len() == self.num_vars
            && self.equalities.iter().all(|e| dot(e, z).cmp0().is_eq())
            && self.vars.iter().zip(z).all(|(c, v)| c.holds(v))
            && self.linear.iter().all(|(g, c)| c.holds(&dot(g, z)))
    }

    /// The relaxed rows `(P, Q)`: `P` holds the equalities, then unit rows
    /// of variables fixed at zero, then zero-constrained linear rows; `Q`
    /// holds `±e_i` for sign-constrained variables, then `±g` for
    /// sign-constrained linear rows. Both in index order.
    pub fn relaxation(&self) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
        let n = self.num_vars;
        let unit = |i: usize, v: i32| {
            let mut e = vec![Rational::new(); n];
            e[i] = Rational::from(v);
            e
        };
        let mut p: Vec<Vec<Rational>> = self.equalities.clone();
        let mut q: Vec<Vec<Rational>> = Vec::new();
        for (i, c) in self.vars.iter().enumerate() {
            if *c == Constraint::Zero {
                p.push(unit(i, 1));
            }
        }
        for (g, c) in &self.linear {
            if *c == Constraint::Zero {
                p.push(g.clone());
            }
        }
        for (i, c) in self.vars.iter().enumerate() {
            match c {
                Constraint::Positive => q.push(unit(i, 1)),
                Constraint::Negative => q.push(unit(i, -1)),
                _ => {}
            }
        }
        for (g, c) in &self.linear {
            match c {
                Constraint::Positive => q.push(g.clone()),
                Constraint::Negative => q.push(g.iter().map(|v| Rational::from(-v)).collect()),
                _ => {}
            }
        }
        (p, q)
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut s = Rational::new();
    for (x, y) in a.iter().zip(b) {
        if x.cmp0().is_ne() && y.cmp0().is_ne() {
            s += Rational::from(x * y);
        }
    }
    s
}

/// Multipliers proving that the relaxed system `P z = 0, Q z >= eps` is
/// empty for every `eps > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub equality_multipliers: Vec<Rational>,
    pub inequality_multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    /// Checks `w >= 0`, `sum(w) = 1` and `Pᵀu + Qᵀw = 0` exactly.
    pub fn verify(&self, sys: &StrictSystem) -> bool {
        let (p, q) = sys.relaxation();
        if self.equality_multipliers.len() != p.len() || self.inequality_multipliers.len() != q.len()
        {
            return false;
        }
        if self.inequality_multipliers.iter().any(|w| w.cmp0().is_lt()) {
            return false;
        }
        let total: Rational = self.inequality_multipliers.iter().sum();
        if total != 1 {
            return false;
        }
        (0..sys.num_vars).all(|k| {
            let mut s = Rational::new();
            for (u, row) in self.equality_multipliers.iter().zip(&p) {
                s += Rational::from(u * &row[k]);
            }
            for (w, row) in self.inequality_multipliers.iter().zip(&q) {
                s += Rational::from(w * &row[k]);
            }
            s.cmp0().is_eq()
        })
    }
}

impl Serialize for FarkasCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FarkasCertificate", 2)?;
        st.serialize_field("equality_multipliers", &format_rationals(&self.equality_multipliers))?;
        st.serialize_field(
            "inequality_multipliers",
            &format_rationals(&self.inequality_multipliers),
        )?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityResult {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible(_))
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityResult::Feasible(z) => Some(z),
            FeasibilityResult::Infeasible(_) => None,
        }
    }

    pub fn certificate(&self) -> Option<&FarkasCertificate> {
        match self {
            FeasibilityResult::Feasible(_) => None,
            FeasibilityResult::Infeasible(c) => Some(c),
        }
    }
}

impl Serialize for FeasibilityResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FeasibilityResult", 2)?;
        match self {
            FeasibilityResult::Feasible(z) => {
                st.serialize_field("status", "feasible")?;
                st.serialize_field("witness", &format_rationals(z))?;
            }
            FeasibilityResult::Infeasible(c) => {
                st.serialize_field("status", "infeasible")?;
                st.serialize_field("certificate", c)?;
            }
        }
        st.end()
    }
}

pub fn solve_strict(sys: &StrictSystem) -> Result<FeasibilityResult> {
    solve_strict_with_epsilon(sys, &Rational::from(1))
}

/// Decides the strict system through its `eps`-relaxation. The answer is
/// re-verified exactly before it is returned.
pub fn solve_strict_with_epsilon(sys: &StrictSystem, eps: &Rational) -> Result<FeasibilityResult> {
    if eps.cmp0().is_le() {
        return Err(Error::Invalid("epsilon must be positive".into()));
    }
    let (p, q) = sys.relaxation();
    let n = sys.num_vars;

    // A zero row in Q reads 0 >= eps on its own.
    if let Some(k) = q.iter().position(|row| row.iter().all(|v| v.cmp0().is_eq())) {
        let mut w = vec![Rational::new(); q.len()];
        w[k] = Rational::from(1);
        return finish(
            sys,
            FeasibilityResult::Infeasible(FarkasCertificate {
                equality_multipliers: vec![Rational::new(); p.len()],
                inequality_multipliers: w,
            }),
        );
    }

    let comps = components(n, p.iter().chain(q.iter()));
    let mut z = vec![Rational::new(); n];
    for vars in &comps {
        let in_comp = |row: &Vec<Rational>| vars.iter().any(|&k| row[k].cmp0().is_ne());
        let p_idx: Vec<usize> = (0..p.len()).filter(|&i| in_comp(&p[i])).collect();
        let q_idx: Vec<usize> = (0..q.len()).filter(|&i| in_comp(&q[i])).collect();
        match solve_component(sys, vars, eps)? {
            Some(part) => {
                for (&k, v) in vars.iter().zip(part) {
                    z[k] = v;
                }
            }
            None => {
                let (u, w) = alternative(&p, &q, vars, &p_idx, &q_idx)?;
                let mut eq = vec![Rational::new(); p.len()];
                let mut ineq = vec![Rational::new(); q.len()];
                for (&i, v) in p_idx.iter().zip(u) {
                    eq[i] = v;
                }
                for (&i, v) in q_idx.iter().zip(w) {
                    ineq[i] = v;
                }
                return finish(
                    sys,
                    FeasibilityResult::Infeasible(FarkasCertificate {
                        equality_multipliers: eq,
                        inequality_multipliers: ineq,
                    }),
                );
            }
        }
    }
    finish(sys, FeasibilityResult::Feasible(z))
}

fn finish(sys: &StrictSystem, result: FeasibilityResult) -> Result<FeasibilityResult> {
    let ok = match &result {
        FeasibilityResult::Feasible(z) => sys.is_satisfied_by(z),
        FeasibilityResult::Infeasible(c) => c.verify(sys),
    };
    if !ok {
        return Err(Error::Internal("feasibility answer failed exact re-verification".into()));
    }
    Ok(result)
}

/// Connected components of variables linked by shared rows, each sorted,
/// ordered by smallest member.
fn components<'a>(n: usize, rows: impl Iterator<Item = &'a Vec<Rational>>) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for row in rows {
        let support: Vec<usize> = (0..n).filter(|&k| row[k].cmp0().is_ne()).collect();
        for w in support.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for k in 0..n {
        let root = find(&mut parent, k);
        groups.entry(root).or_default().push(k);
    }
    groups.into_values().collect()
}

/// How one original variable is expressed in nonnegative LP columns:
/// `z = offset + sum(coef * w_col)`.
struct VarMap {
    offset: Rational,
    cols: Vec<(usize, i32)>,
}

/// Primal LP on one component. Signed variables are shifted by `±eps`
/// instead of split, zero variables vanish, free ones are split.
fn solve_component(sys: &StrictSystem, vars: &[usize], eps: &Rational) -> Result<Option<Vec<Rational>>> {
    let mut maps = Vec::with_capacity(vars.len());
    let mut ncols = 0;
    for &k in vars {
        let m = match sys.vars[k] {
            Constraint::Positive => {
                ncols += 1;
                VarMap { offset: eps.clone(), cols: vec![(ncols - 1, 1)] }
            }
            Constraint::Negative => {
                ncols += 1;
                VarMap { offset: Rational::from(-eps), cols: vec![(ncols - 1, -1)] }
            }
            Constraint::Zero => VarMap { offset: Rational::new(), cols: vec![] },
            Constraint::Free => {
                ncols += 2;
                VarMap { offset: Rational::new(), cols: vec![(ncols - 2, 1), (ncols - 1, -1)] }
            }
        };
        maps.push(m);
    }

    let touches = |row: &[Rational]| vars.iter().any(|&k| row[k].cmp0().is_ne());
    // (row over component variables, constraint) with rows as `g · z (c) 0`.
    let mut rows: Vec<(Vec<Rational>, Constraint)> = Vec::new();
    for e in &sys.equalities {
        if touches(e) {
            rows.push((vars.iter().map(|&k| e[k].clone()).collect(), Constraint::Zero));
        }
    }
    for (g, c) in &sys.linear {
        if *c != Constraint::Free && touches(g) {
            rows.push((vars.iter().map(|&k| g[k].clone()).collect(), *c));
        }
    }
    let slacks = rows.iter().filter(|(_, c)| *c != Constraint::Zero).count();
    let total = ncols + slacks;

    let mut a = Vec::with_capacity(rows.len());
    let mut b = Vec::with_capacity(rows.len());
    let mut slack = ncols;
    for (g, c) in &rows {
        let mut lp_row = vec![Rational::new(); total];
        let mut constant = Rational::new();
        for (coef, m) in g.iter().zip(&maps) {
            if coef.cmp0().is_eq() {
                continue;
            }
            constant += Rational::from(coef * &m.offset);
            for &(col, s) in &m.cols {
                lp_row[col] += Rational::from(coef * s);
            }
        }
        // g·z = (lp_row · w) + constant.
        let rhs = match c {
            Constraint::Zero => Rational::from(-&constant),
            Constraint::Positive => {
                lp_row[slack] = Rational::from(-1);
                slack += 1;
                Rational::from(eps - &constant)
            }
            Constraint::Negative => {
                for v in lp_row.iter_mut() {
                    *v = Rational::from(-&*v);
                }
                lp_row[slack] = Rational::from(-1);
                slack += 1;
                Rational::from(eps + &constant)
            }
            Constraint::Free => unreachable!(),
        };
        a.push(lp_row);
        b.push(rhs);
    }

    let Some(w) = phase_one(&a, &b, total) else {
        return Ok(None);
    };
    Ok(Some(
        maps.iter()
            .map(|m| {
                let mut v = m.offset.clone();
                for &(col, s) in &m.cols {
                    v += Rational::from(&w[col] * s);
                }
                v
            })
            .collect(),
    ))
}

/// Solves `Pᵀu + Qᵀw = 0, w >= 0, sum(w) = 1` restricted to one component.
fn alternative(
    p: &[Vec<Rational>],
    q: &[Vec<Rational>],
    vars: &[usize],
    p_idx: &[usize],
    q_idx: &[usize],
) -> Result<(Vec<Rational>, Vec<Rational>)> {
    let np = p_idx.len();
    let nq = q_idx.len();
    let cols = 2 * np + nq;
    let mut a = Vec::with_capacity(vars.len() + 1);
    let mut b = Vec::with_capacity(vars.len() + 1);
    for &k in vars {
        let mut row = vec![Rational::new(); cols];
        for (c, &i) in p_idx.iter().enumerate() {
            row[2 * c] = p[i][k].clone();
            row[2 * c + 1] = Rational::from(-&p[i][k]);
        }
        for (c, &i) in q_idx.iter().enumerate() {
            row[2 * np + c] = q[i][k].clone();
        }
        a.push(row);
        b.push(Rational::new());
    }
    let mut sum = vec![Rational::new(); cols];
    for v in sum.iter_mut().skip(2 * np) {
        *v = Rational::from(1);
    }
    a.push(sum);
    b.push(Rational::from(1));

    let sol = phase_one(&a, &b, cols).ok_or_else(|| {
        Error::Internal("neither the system nor its alternative is feasible".into())
    })?;
    let u = (0..np)
        .map(|c| Rational::from(&sol[2 * c] - &sol[2 * c + 1]))
        .collect();
    let w = sol[2 * np..].to_vec();
    Ok((u, w))
}

/// Decides whether some `(x, y)` has `A x = 0`, `σ(x) = mu`, `σ(B y) = mu`
/// and `σ(y) = tau`. The witness is the concatenation `(x, y)`.
pub fn feasible_sign_pair(
    a: &RationalMatrix,
    b: &RationalMatrix,
    mu: &SignVector,
    tau: &SignVector,
) -> Result<FeasibilityResult> {
    let (r, n) = (b.rows(), b.cols());
    if a.cols() != r {
        return Err(Error::ShapeMismatch(format!(
            "A has {} columns but B has {r} rows",
            a.cols()
        )));
    }
    if mu.len() != r {
        return Err(Error::LengthMismatch(r, mu.len()));
    }
    if tau.len() != n {
        return Err(Error::LengthMismatch(n, tau.len()));
    }
    let mut sys = StrictSystem::new(r + n);
    for i in 0..r {
        sys.constrain_var(i, Constraint::from_sign(mu.get(i)));
    }
    for i in 0..n {
        sys.constrain_var(r + i, Constraint::from_sign(tau.get(i)));
    }
    sys.add_equalities_at(a, 0)?;
    sys.add_linear_signs_at(b, mu, r)?;
    solve_strict(&sys)
}

/// Is there `t` with `b_j · t > 0` for every row `b_j` of `B`?
pub fn open_halfspace_contains_rows(b: &RationalMatrix) -> Result<FeasibilityResult> {
    let mut sys = StrictSystem::new(b.cols());
    for j in 0..b.rows() {
        sys.add_linear(b.row(j).to_vec(), Constraint::Positive)?;
    }
    solve_strict(&sys)
}

/// Is there `mu > 0` with `A mu = y`? Solved homogeneously as
/// `A mu - theta y = 0, mu > 0, theta > 0`; a feasible answer carries
/// `mu / theta`, an infeasible one a certificate for the homogeneous system
/// in the variables `(mu, theta)`.
pub fn cone_interior_membership(a: &RationalMatrix, y: &[Rational]) -> Result<FeasibilityResult> {
    if y.len() != a.rows() {
        return Err(Error::ShapeMismatch(format!(
            "y has length {} but A has {} rows",
            y.len(),
            a.rows()
        )));
    }
    let r = a.cols();
    let mut sys = StrictSystem::new(r + 1);
    for k in 0..=r {
        sys.constrain_var(k, Constraint::Positive);
    }
    for (i, yi) in y.iter().enumerate() {
        let mut row = a.row(i).to_vec();
        row.push(Rational::from(-yi));
        sys.add_equality(row)?;
    }
    Ok(match solve_strict(&sys)? {
        FeasibilityResult::Feasible(z) => {
            let theta = z[r].clone();
            let mu: Vec<Rational> = z[..r].iter().map(|v| Rational::from(v / &theta)).collect();
            let check = a.mul_vec(&mu)?;
            if check != y || mu.iter().any(|v| v.cmp0().is_le()) {
                return Err(Error::Internal("cone witness does not reproduce y".into()));
            }
            FeasibilityResult::Feasible(mu)
        }
        infeasible => infeasible,
    })
}
