//! Exact two-phase simplex with Bland's rule.
//!
//! The tableau keeps every row as an integer vector over a positive row
//! denominator. Rows live in `i128` and the whole solve is redone over
//! `BigInt` if any intermediate value overflows. Each optimum is checked
//! against its dual before it is returned.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::{lcm_of_denominators, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarBound {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub bounds: Vec<VarBound>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// `duals` satisfy `Σ rhs·y = objective`. For a minimization `Aᵀy ≤ c` on
/// nonnegative variables, for a maximization `Aᵀy ≥ c`; equality on free ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpResult {
    pub status: LpStatus,
    pub primal: Vec<Rational>,
    pub duals: Vec<Rational>,
    pub objective: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("constraint {0} refers to variable {1} but there are {2} variables")]
    BadVariable(usize, usize, usize),
    #[error("objective has {0} entries but there are {1} variables")]
    BadObjective(usize, usize),
    #[error("optimality certificate rejected: {0}")]
    Certificate(String),
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        LpProblem { sense, objective: Vec::new(), bounds: Vec::new(), constraints: Vec::new() }
    }

    pub fn add_var(&mut self, bound: VarBound, cost: Rational) -> usize {
        self.objective.push(cost);
        self.bounds.push(bound);
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> usize {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self.constraints.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check_shape(&self) -> Result<(), LpError> {
        let n = self.bounds.len();
        if self.objective.len() != n {
            return Err(LpError::BadObjective(self.objective.len(), n));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if let Some(&(j, _)) = c.coeffs.iter().find(|(j, _)| *j >= n) {
                return Err(LpError::BadVariable(i, j, n));
            }
        }
        Ok(())
    }
}

pub fn solve_lp(p: &LpProblem) -> Result<LpResult, LpError> {
    p.check_shape()?;
    let min = to_min_form(p);
    let rows = min.constraints.iter().filter(|c| !c.coeffs.is_empty()).count();
    let out = if min.num_vars() < rows { solve_via_dual(&min) } else { solve_direct(&min) };
    let result = match out {
        Outcome::Optimal { x, y } => {
            let (objective, duals) = match p.sense {
                Sense::Minimize => (dot(&p.objective, &x), y),
                Sense::Maximize => (dot(&p.objective, &x), y.into_iter().map(|v| -v).collect()),
            };
            let r = LpResult { status: LpStatus::Optimal, primal: x, duals, objective };
            verify_certificate(p, &r)?;
            r
        }
        Outcome::Infeasible => empty_result(LpStatus::Infeasible),
        Outcome::Unbounded => empty_result(LpStatus::Unbounded),
    };
    Ok(result)
}

fn empty_result(status: LpStatus) -> LpResult {
    LpResult { status, primal: Vec::new(), duals: Vec::new(), objective: Rational::zero() }
}

fn dot(c: &[Rational], x: &[Rational]) -> Rational {
    c.iter().zip(x).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
}

fn row_value(c: &Constraint, x: &[Rational]) -> Rational {
    c.coeffs.iter().fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j])
}

/// Primal feasibility, dual feasibility and equal objectives.
pub fn verify_certificate(p: &LpProblem, r: &LpResult) -> Result<(), LpError> {
    let fail = |m: String| Err(LpError::Certificate(m));
    let n = p.num_vars();
    if r.primal.len() != n || r.duals.len() != p.constraints.len() {
        return fail("dimension mismatch".into());
    }
    for (j, b) in p.bounds.iter().enumerate() {
        if *b == VarBound::NonNegative && r.primal[j].is_negative() {
            return fail(format!("variable {j} negative"));
        }
    }
    let flip = match p.sense {
        Sense::Minimize => Rational::one(),
        Sense::Maximize => -Rational::one(),
    };
    let mut reduced: Vec<Rational> = p.objective.iter().map(|c| c * &flip).collect();
    for (i, c) in p.constraints.iter().enumerate() {
        let lhs = row_value(c, &r.primal);
        let ok = match c.relation {
            Relation::Le => lhs <= c.rhs,
            Relation::Ge => lhs >= c.rhs,
            Relation::Eq => lhs == c.rhs,
        };
        if !ok {
            return fail(format!("row {i} violated"));
        }
        let y = &r.duals[i] * &flip;
        let sign_ok = match c.relation {
            Relation::Le => !y.is_positive(),
            Relation::Ge => !y.is_negative(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return fail(format!("dual {i} has the wrong sign"));
        }
        for (j, a) in &c.coeffs {
            reduced[*j] -= a * &y;
        }
    }
    for (j, b) in p.bounds.iter().enumerate() {
        let ok = match b {
            VarBound::NonNegative => !reduced[j].is_negative(),
            VarBound::Free => reduced[j].is_zero(),
        };
        if !ok {
            return fail(format!("reduced cost of variable {j} infeasible"));
        }
    }
    let dual_obj = p.constraints.iter().zip(&r.duals).fold(Rational::zero(), |acc, (c, y)| acc + &c.rhs * y);
    if dual_obj != r.objective || dot(&p.objective, &r.primal) != r.objective {
        return fail("objectives differ".into());
    }
    Ok(())
}

enum Outcome {
    Optimal { x: Vec<Rational>, y: Vec<Rational> },
    Infeasible,
    Unbounded,
}

fn to_min_form(p: &LpProblem) -> LpProblem {
    let mut q = p.clone();
    if p.sense == Sense::Maximize {
        q.objective = p.objective.iter().map(|c| -c).collect();
        q.sense = Sense::Minimize;
    }
    q
}

/// Solves a minimization through its LP dual; returns the original primal and duals.
fn solve_via_dual(p: &LpProblem) -> Outcome {
    let mut d = LpProblem::new(Sense::Maximize);
    let mut sign = Vec::with_capacity(p.constraints.len());
    for c in &p.constraints {
        let (bound, s) = match c.relation {
            Relation::Ge => (VarBound::NonNegative, Rational::one()),
            Relation::Le => (VarBound::NonNegative, -Rational::one()),
            Relation::Eq => (VarBound::Free, Rational::one()),
        };
        d.add_var(bound, &c.rhs * &s);
        sign.push(s);
    }
    let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); p.num_vars()];
    for (i, c) in p.constraints.iter().enumerate() {
        for (j, a) in &c.coeffs {
            cols[*j].push((i, a * &sign[i]));
        }
    }
    for (j, col) in cols.into_iter().enumerate() {
        let rel = match p.bounds[j] {
            VarBound::NonNegative => Relation::Le,
            VarBound::Free => Relation::Eq,
        };
        d.add_constraint(col, rel, p.objective[j].clone());
    }
    let dmin = to_min_form(&d);
    match solve_direct(&dmin) {
        Outcome::Optimal { x: yd, y: xd } => {
            // `xd` are the duals of the negated objective, so they flip sign.
            let x = xd.into_iter().map(|v| -v).collect();
            let y = yd.into_iter().zip(&sign).map(|(v, s)| v * s).collect();
            Outcome::Optimal { x, y }
        }
        Outcome::Infeasible => {
            // Dual infeasible means the primal is infeasible or unbounded.
            match solve_direct(&phase_one_only(p)) {
                Outcome::Infeasible => Outcome::Infeasible,
                _ => Outcome::Unbounded,
            }
        }
        Outcome::Unbounded => Outcome::Infeasible,
    }
}

fn phase_one_only(p: &LpProblem) -> LpProblem {
    let mut q = p.clone();
    q.objective = vec![Rational::zero(); p.num_vars()];
    q
}

fn solve_direct(p: &LpProblem) -> Outcome {
    match Simplex::<i128>::run(p) {
        Ok(o) => o,
        Err(Overflow) => {
            log::debug!("simplex overflowed i128, retrying with big integers");
            Simplex::<BigInt>::run(p).unwrap_or_else(|_| unreachable!("big integers cannot overflow"))
        }
    }
}

#[derive(Debug)]
struct Overflow;

trait TabNum: Clone + std::fmt::Debug {
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_one(&self) -> bool;
    /// `a·b − c·d`
    fn mul_sub(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self>;
    fn mul(a: &Self, b: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, g: &Self) -> Self;
}

impl TabNum for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_pos(&self) -> bool {
        *self > 0
    }
    fn is_neg(&self) -> bool {
        *self < 0
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn mul_sub(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        a.checked_mul(*b)?.checked_sub(c.checked_mul(*d)?)
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        a.checked_mul(*b)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
}

impl TabNum for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn mul_sub(a: &Self, b: &Self, c: &Self, d: &Self) -> Option<Self> {
        Some(a * b - c * d)
    }
    fn mul(a: &Self, b: &Self) -> Option<Self> {
        Some(a * b)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, g: &Self) -> Self {
        self / g
    }
}

/// `a/b` against `c/d` for positive `b`, `d`.
fn cmp_frac<R: TabNum>(a: &R, b: &R, c: &R, d: &R) -> Ordering {
    match (R::mul(a, d), R::mul(c, b)) {
        (Some(l), Some(r)) => l.to_big().cmp(&r.to_big()),
        _ => (a.to_big() * d.to_big()).cmp(&(c.to_big() * b.to_big())),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct Simplex<R: TabNum> {
    /// Each row holds `ncols` coefficients followed by the right-hand side.
    rows: Vec<Vec<R>>,
    den: Vec<R>,
    basis: Vec<usize>,
    /// Original constraint index of each tableau row.
    origin: Vec<usize>,
    obj: Vec<BigInt>,
    obj_den: BigInt,
    kind: Vec<ColKind>,
    ncols: usize,
}

struct Layout {
    /// Tableau columns `(plus, minus)` of each variable.
    var_cols: Vec<(usize, Option<usize>)>,
    /// Per constraint: negated?, dual-reading column and its sign.
    row_dual: Vec<Option<(bool, usize)>>,
    cost: Vec<Rational>,
}

impl<R: TabNum> Simplex<R> {
    fn run(p: &LpProblem) -> Result<Outcome, Overflow> {
        let n = p.num_vars();
        let mut var_cols = Vec::with_capacity(n);
        let mut kind = Vec::new();
        let mut cost = Vec::new();
        for j in 0..n {
            let plus = kind.len();
            kind.push(ColKind::Structural);
            cost.push(p.objective[j].clone());
            let minus = if p.bounds[j] == VarBound::Free {
                kind.push(ColKind::Structural);
                cost.push(-p.objective[j].clone());
                Some(plus + 1)
            } else {
                None
            };
            var_cols.push((plus, minus));
        }

        struct RawRow {
            coeffs: Vec<(usize, Rational)>,
            rhs: Rational,
            rel: Relation,
            origin: usize,
            negated: bool,
        }
        let mut raw = Vec::new();
        for (i, c) in p.constraints.iter().enumerate() {
            let mut coeffs = Vec::new();
            for (j, a) in &c.coeffs {
                if a.is_zero() {
                    continue;
                }
                let (plus, minus) = var_cols[*j];
                coeffs.push((plus, a.clone()));
                if let Some(m) = minus {
                    coeffs.push((m, -a.clone()));
                }
            }
            if coeffs.is_empty() {
                let ok = match c.relation {
                    Relation::Le => !c.rhs.is_negative(),
                    Relation::Ge => !c.rhs.is_positive(),
                    Relation::Eq => c.rhs.is_zero(),
                };
                if !ok {
                    return Ok(Outcome::Infeasible);
                }
                continue;
            }
            let negated = c.rhs.is_negative();
            let (rhs, rel) = if negated {
                for (_, a) in coeffs.iter_mut() {
                    *a = -a.clone();
                }
                let rel = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (-c.rhs.clone(), rel)
            } else {
                (c.rhs.clone(), c.relation)
            };
            raw.push(RawRow { coeffs, rhs, rel, origin: i, negated });
        }

        let mut row_dual: Vec<Option<(bool, usize)>> = vec![None; p.constraints.len()];
        let mut extra: Vec<Vec<(usize, i64)>> = vec![Vec::new(); raw.len()];
        let mut basis = vec![0; raw.len()];
        for (r, row) in raw.iter().enumerate() {
            match row.rel {
                Relation::Le => {
                    let s = kind.len();
                    kind.push(ColKind::Slack);
                    cost.push(Rational::zero());
                    extra[r].push((s, 1));
                    basis[r] = s;
                    row_dual[row.origin] = Some((row.negated, s));
                }
                Relation::Ge => {
                    let s = kind.len();
                    kind.push(ColKind::Slack);
                    cost.push(Rational::zero());
                    extra[r].push((s, -1));
                }
                Relation::Eq => {}
            }
        }
        for (r, row) in raw.iter().enumerate() {
            if row.rel != Relation::Le {
                let a = kind.len();
                kind.push(ColKind::Artificial);
                cost.push(Rational::zero());
                extra[r].push((a, 1));
                basis[r] = a;
                row_dual[row.origin] = Some((row.negated, a));
            }
        }
        let ncols = kind.len();
        let mut rows = Vec::with_capacity(raw.len());
        let mut den = Vec::with_capacity(raw.len());
        for (r, row) in raw.iter().enumerate() {
            let l = lcm_of_denominators(row.coeffs.iter().map(|(_, a)| a).chain([&row.rhs]));
            let mut t = vec![R::zero(); ncols + 1];
            for (j, a) in &row.coeffs {
                let v = (a * Rational::from_integer(l.clone())).to_integer();
                t[*j] = R::from_big(&v).ok_or(Overflow)?;
            }
            for &(j, a) in &extra[r] {
                t[j] = R::from_big(&(&l * BigInt::from(a))).ok_or(Overflow)?;
            }
            let v = (&row.rhs * Rational::from_integer(l.clone())).to_integer();
            t[ncols] = R::from_big(&v).ok_or(Overflow)?;
            rows.push(t);
            den.push(R::from_big(&l).ok_or(Overflow)?);
        }
        let origin = raw.iter().map(|r| r.origin).collect();
        let mut s = Simplex { rows, den, basis, origin, obj: Vec::new(), obj_den: BigInt::one(), kind, ncols };
        let layout = Layout { var_cols, row_dual, cost };
        for r in 0..s.rows.len() {
            s.reduce_row(r);
        }

        if s.kind.contains(&ColKind::Artificial) {
            let c1: Vec<Rational> = s
                .kind
                .iter()
                .map(|k| if *k == ColKind::Artificial { Rational::one() } else { Rational::zero() })
                .collect();
            s.price(&c1);
            if let Step::Unbounded = s.iterate(true)? {
                unreachable!("phase one is bounded below");
            }
            if s.obj[s.ncols].is_negative() {
                return Ok(Outcome::Infeasible);
            }
            s.drive_out_artificials()?;
        }
        s.price(&layout.cost);
        if let Step::Unbounded = s.iterate(false)? {
            return Ok(Outcome::Unbounded);
        }
        Ok(s.extract(p, &layout))
    }

    fn value(&self, r: usize, j: usize) -> Rational {
        Rational::new(self.rows[r][j].to_big(), self.den[r].to_big())
    }

    /// Sets the objective row to reduced costs of `c` for the current basis.
    fn price(&mut self, c: &[Rational]) {
        let mut o: Vec<Rational> = c.iter().cloned().chain([Rational::zero()]).collect();
        for r in 0..self.rows.len() {
            let cb = &c[self.basis[r]];
            if cb.is_zero() {
                continue;
            }
            let d = self.den[r].to_big();
            for (j, t) in self.rows[r].iter().enumerate() {
                if !t.is_zero() {
                    o[j] -= cb * Rational::new(t.to_big(), d.clone());
                }
            }
        }
        let l = lcm_of_denominators(o.iter());
        let lr = Rational::from_integer(l.clone());
        self.obj = o.iter().map(|x| (x * &lr).to_integer()).collect();
        self.obj_den = l;
        self.reduce_obj();
    }

    fn iterate(&mut self, phase_one: bool) -> Result<Step, Overflow> {
        loop {
            let entering = (0..self.ncols)
                .find(|&j| self.obj[j].is_negative() && (phase_one || self.kind[j] != ColKind::Artificial));
            let Some(s) = entering else {
                return Ok(Step::Optimal);
            };
            let mut best: Option<usize> = None;
            for r in 0..self.rows.len() {
                if !self.rows[r][s].is_pos() {
                    continue;
                }
                best = Some(match best {
                    None => r,
                    Some(b) => {
                        let ord = cmp_frac(
                            &self.rows[r][self.ncols],
                            &self.rows[r][s],
                            &self.rows[b][self.ncols],
                            &self.rows[b][s],
                        );
                        match ord {
                            Ordering::Less => r,
                            Ordering::Equal if self.basis[r] < self.basis[b] => r,
                            _ => b,
                        }
                    }
                });
            }
            let Some(r) = best else {
                return Ok(Step::Unbounded);
            };
            self.pivot(r, s)?;
        }
    }

    fn drive_out_artificials(&mut self) -> Result<(), Overflow> {
        let mut r = 0;
        while r < self.rows.len() {
            if self.kind[self.basis[r]] == ColKind::Artificial {
                let col = (0..self.ncols).find(|&j| self.kind[j] != ColKind::Artificial && !self.rows[r][j].is_zero());
                match col {
                    Some(j) => self.pivot(r, j)?,
                    None => {
                        self.rows.remove(r);
                        self.den.remove(r);
                        self.basis.remove(r);
                        self.origin.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        Ok(())
    }

    fn pivot(&mut self, r: usize, s: usize) -> Result<(), Overflow> {
        let pr = std::mem::take(&mut self.rows[r]);
        let prs = pr[s].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][s].is_zero() {
                continue;
            }
            let row = &mut self.rows[i];
            let m = row[s].clone();
            for (j, x) in row.iter_mut().enumerate() {
                if pr[j].is_zero() {
                    if !x.is_zero() {
                        *x = R::mul(x, &prs).ok_or(Overflow)?;
                    }
                } else {
                    *x = R::mul_sub(x, &prs, &m, &pr[j]).ok_or(Overflow)?;
                }
            }
            self.den[i] = R::mul(&self.den[i], &prs).ok_or(Overflow)?;
            self.fix_sign(i)?;
            self.reduce_row(i);
        }
        let prs_big = prs.to_big();
        let m = self.obj[s].clone();
        if !Zero::is_zero(&m) {
            for (j, x) in self.obj.iter_mut().enumerate() {
                let t = pr[j].to_big();
                *x = &*x * &prs_big - &m * t;
            }
            self.obj_den *= &prs_big;
            if self.obj_den.is_negative() {
                self.obj_den = -&self.obj_den;
                for x in self.obj.iter_mut() {
                    *x = -&*x;
                }
            }
            self.reduce_obj();
        }
        self.rows[r] = pr;
        self.den[r] = prs;
        self.fix_sign(r)?;
        self.reduce_row(r);
        self.basis[r] = s;
        Ok(())
    }

    fn fix_sign(&mut self, i: usize) -> Result<(), Overflow> {
        if self.den[i].is_neg() {
            self.den[i] = self.den[i].neg().ok_or(Overflow)?;
            for x in self.rows[i].iter_mut() {
                *x = x.neg().ok_or(Overflow)?;
            }
        }
        Ok(())
    }

    fn reduce_row(&mut self, i: usize) {
        let mut g = self.den[i].clone();
        for x in &self.rows[i] {
            if g.is_one() {
                return;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if g.is_one() || g.is_zero() {
            return;
        }
        for x in self.rows[i].iter_mut() {
            *x = x.div_exact(&g);
        }
        self.den[i] = self.den[i].div_exact(&g);
    }

    fn reduce_obj(&mut self) {
        let mut g = self.obj_den.clone();
        for x in &self.obj {
            if One::is_one(&g) {
                return;
            }
            if !Zero::is_zero(x) {
                g = Integer::gcd(&g, x);
            }
        }
        if One::is_one(&g) {
            return;
        }
        for x in self.obj.iter_mut() {
            *x = &*x / &g;
        }
        self.obj_den = &self.obj_den / &g;
    }

    fn extract(&self, p: &LpProblem, layout: &Layout) -> Outcome {
        let mut col_val = vec![Rational::zero(); self.ncols];
        for (r, &b) in self.basis.iter().enumerate() {
            col_val[b] = self.value(r, self.ncols);
        }
        let x = layout
            .var_cols
            .iter()
            .map(|&(plus, minus)| match minus {
                Some(m) => &col_val[plus] - &col_val[m],
                None => col_val[plus].clone(),
            })
            .collect();
        let mut live = vec![false; p.constraints.len()];
        for &o in &self.origin {
            live[o] = true;
        }
        let y = (0..p.constraints.len())
            .map(|i| match layout.row_dual[i] {
                Some((negated, col)) if live[i] => {
                    let rc = Rational::new(self.obj[col].clone(), self.obj_den.clone());
                    if negated {
                        rc
                    } else {
                        -rc
                    }
                }
                _ => Rational::zero(),
            })
            .collect();
        Outcome::Optimal { x, y }
    }
}

enum Step {
    Optimal,
    Unbounded,
}
