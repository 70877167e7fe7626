//! Exact linear programming.
//!
//! Two-phase tableau simplex with Bland's rule. The tableau is kept
//! integral: stored entries are the true entries times a common positive
//! denominator, and every pivot divides exactly by the previous pivot
//! (Edmonds' integer-preserving update). Arithmetic runs on checked `i128`
//! and restarts on `BigInt` if anything overflows.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

/// `maximize objective . x` subject to `rows` and `x >= 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub nvars: usize,
    pub objective: Vec<BigInt>,
    pub rows: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<BigInt>,
    pub relation: Relation,
    pub rhs: BigInt,
}

impl Constraint {
    pub fn new(coeffs: Vec<BigInt>, relation: Relation, rhs: BigInt) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<BigRational>, value: BigRational },
    /// `y` has one entry per constraint: `y . A_j >= 0` for every column,
    /// `y . b < 0`, `y_i >= 0` on `Le` rows and `y_i <= 0` on `Ge` rows.
    Infeasible { farkas: Vec<BigRational> },
    Unbounded,
}

impl LinearProgram {
    pub fn new(nvars: usize) -> Self {
        LinearProgram { nvars, objective: vec![<BigInt as Zero>::zero(); nvars], rows: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<BigInt>, relation: Relation, rhs: BigInt) {
        debug_assert_eq!(coeffs.len(), self.nvars);
        self.rows.push(Constraint::new(coeffs, relation, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        match Tableau::<i128>::run(self) {
            Some(out) => out,
            None => Tableau::<BigInt>::run(self).expect("BigInt arithmetic cannot overflow"),
        }
    }

    /// Checks that `x` satisfies every constraint exactly.
    pub fn is_feasible(&self, x: &[BigRational]) -> bool {
        if x.len() != self.nvars || x.iter().any(|v| v.is_negative()) {
            return false;
        }
        self.rows.iter().all(|c| {
            let lhs: BigRational = c
                .coeffs
                .iter()
                .zip(x)
                .map(|(a, v)| BigRational::from_integer(a.clone()) * v)
                .sum();
            let rhs = BigRational::from_integer(c.rhs.clone());
            match c.relation {
                Relation::Le => lhs <= rhs,
                Relation::Ge => lhs >= rhs,
                Relation::Eq => lhs == rhs,
            }
        })
    }

    /// Checks an infeasibility certificate as documented on [`LpOutcome`].
    pub fn is_farkas_certificate(&self, y: &[BigRational]) -> bool {
        if y.len() != self.rows.len() {
            return false;
        }
        for (c, yi) in self.rows.iter().zip(y) {
            match c.relation {
                Relation::Le if yi.is_negative() => return false,
                Relation::Ge if yi.is_positive() => return false,
                _ => {}
            }
        }
        for j in 0..self.nvars {
            let s: BigRational = self
                .rows
                .iter()
                .zip(y)
                .map(|(c, yi)| BigRational::from_integer(c.coeffs[j].clone()) * yi)
                .sum();
            if s.is_negative() {
                return false;
            }
        }
        let yb: BigRational =
            self.rows.iter().zip(y).map(|(c, yi)| BigRational::from_integer(c.rhs.clone()) * yi).sum();
        yb.is_negative()
    }
}

trait Num: Clone + Ord + Debug {
    fn from_big(x: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div_exact(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Num for i128 {
    fn from_big(x: &BigInt) -> Option<Self> {
        x.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        debug_assert_eq!(self % o, 0);
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Num for BigInt {
    fn from_big(x: &BigInt) -> Option<Self> {
        Some(x.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn one() -> Self {
        BigInt::from(1)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau<T> {
    /// Constraint rows; the last column is the right-hand side.
    rows: Vec<Vec<T>>,
    /// Objective row `D * (z_j - c_j)`.
    obj: Vec<T>,
    denom: T,
    basis: Vec<usize>,
    kinds: Vec<ColKind>,
    dead: Vec<bool>,
}

impl<T: Num> Tableau<T> {
    fn run(lp: &LinearProgram) -> Option<LpOutcome> {
        let m = lp.rows.len();
        // Normalize to nonnegative right-hand sides.
        let mut flipped = vec![false; m];
        let mut rel = Vec::with_capacity(m);
        for (i, c) in lp.rows.iter().enumerate() {
            let neg = c.rhs.is_negative();
            flipped[i] = neg;
            rel.push(match (c.relation, neg) {
                (Relation::Le, true) => Relation::Ge,
                (Relation::Ge, true) => Relation::Le,
                (r, _) => r,
            });
        }
        let n = lp.nvars;
        let n_slack = rel.iter().filter(|r| **r != Relation::Eq).count();
        let n_art = rel.iter().filter(|r| **r != Relation::Le).count();
        let ncols = n + n_slack + n_art;
        let mut kinds = vec![ColKind::Structural; n];
        kinds.extend(std::iter::repeat_n(ColKind::Slack, n_slack));
        kinds.extend(std::iter::repeat_n(ColKind::Artificial, n_art));

        let mut rows = vec![vec![T::zero(); ncols + 1]; m];
        let mut basis = vec![0; m];
        // Column that started as the unit vector of each row, with its
        // phase-one cost.
        let mut initial = vec![(0usize, 0i8); m];
        let (mut s, mut a) = (n, n + n_slack);
        for i in 0..m {
            let c = &lp.rows[i];
            let sign = if flipped[i] { -1 } else { 1 };
            for j in 0..n {
                let v = if sign < 0 { -c.coeffs[j].clone() } else { c.coeffs[j].clone() };
                rows[i][j] = T::from_big(&v)?;
            }
            let rhs = if sign < 0 { -c.rhs.clone() } else { c.rhs.clone() };
            rows[i][ncols] = T::from_big(&rhs)?;
            match rel[i] {
                Relation::Le => {
                    rows[i][s] = T::one();
                    basis[i] = s;
                    initial[i] = (s, 0);
                    s += 1;
                }
                Relation::Ge => {
                    rows[i][s] = T::one().neg();
                    s += 1;
                    rows[i][a] = T::one();
                    basis[i] = a;
                    initial[i] = (a, -1);
                    a += 1;
                }
                Relation::Eq => {
                    rows[i][a] = T::one();
                    basis[i] = a;
                    initial[i] = (a, -1);
                    a += 1;
                }
            }
        }
        // Phase one: maximize -(sum of artificials).
        let mut obj = vec![T::zero(); ncols + 1];
        for i in 0..m {
            if kinds[basis[i]] == ColKind::Artificial {
                for j in 0..=ncols {
                    if kinds.get(j) != Some(&ColKind::Artificial) {
                        obj[j] = obj[j].sub(&rows[i][j])?;
                    }
                }
            }
        }
        let mut t = Tableau { rows, obj, denom: T::one(), basis, kinds, dead: vec![false; m] };
        if n_art > 0 {
            let bounded = t.optimize(true)?;
            debug_assert!(bounded, "phase one is bounded");
            if t.obj[ncols] != T::zero() {
                // Duals y_i = c_e - reduced cost of the row's initial column,
                // with reduced cost = -obj / D.
                let d = BigRational::from_integer(t.denom.to_big());
                let farkas = (0..m)
                    .map(|i| {
                        let (col, cost) = initial[i];
                        let y = BigRational::from_integer(BigInt::from(cost))
                            + BigRational::from_integer(t.obj[col].to_big()) / &d;
                        if flipped[i] {
                            -y
                        } else {
                            y
                        }
                    })
                    .collect();
                return Some(LpOutcome::Infeasible { farkas });
            }
            t.drive_out_artificials()?;
        }
        // Phase two.
        let cost: Vec<T> = lp.objective.iter().map(T::from_big).collect::<Option<_>>()?;
        let mut obj = vec![T::zero(); ncols + 1];
        for j in 0..=ncols {
            let mut acc = T::zero();
            for i in 0..m {
                if !t.dead[i] && t.basis[i] < n {
                    acc = acc.add(&cost[t.basis[i]].mul(&t.rows[i][j])?)?;
                }
            }
            if j < n {
                acc = acc.sub(&cost[j].mul(&t.denom)?)?;
            }
            obj[j] = acc;
        }
        t.obj = obj;
        if !t.optimize(false)? {
            return Some(LpOutcome::Unbounded);
        }
        let d = BigRational::from_integer(t.denom.to_big());
        let mut x = vec![BigRational::zero(); n];
        for i in 0..m {
            if !t.dead[i] && t.basis[i] < n {
                x[t.basis[i]] = BigRational::from_integer(t.rows[i][ncols].to_big()) / &d;
            }
        }
        let value = BigRational::from_integer(t.obj[ncols].to_big()) / &d;
        Some(LpOutcome::Optimal { x, value })
    }

    fn ncols(&self) -> usize {
        self.kinds.len()
    }

    /// Runs simplex iterations; `Some(false)` means unbounded.
    fn optimize(&mut self, phase_one: bool) -> Option<bool> {
        let nc = self.ncols();
        loop {
            let entering = (0..nc).find(|&j| {
                (phase_one || self.kinds[j] != ColKind::Artificial) && self.obj[j] < T::zero()
            });
            let Some(c) = entering else {
                return Some(true);
            };
            let mut best: Option<usize> = None;
            for i in 0..self.rows.len() {
                if self.dead[i] || self.rows[i][c] <= T::zero() {
                    continue;
                }
                best = Some(match best {
                    None => i,
                    Some(b) => {
                        let lhs = self.rows[i][nc].mul(&self.rows[b][c])?;
                        let rhs = self.rows[b][nc].mul(&self.rows[i][c])?;
                        if lhs < rhs || (lhs == rhs && self.basis[i] < self.basis[b]) {
                            i
                        } else {
                            b
                        }
                    }
                });
            }
            let Some(r) = best else {
                return Some(false);
            };
            self.pivot(r, c)?;
        }
    }

    fn pivot(&mut self, r: usize, c: usize) -> Option<()> {
        let nc = self.ncols();
        let p = self.rows[r][c].clone();
        let prow = self.rows[r].clone();
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c].clone();
            let row = &mut self.rows[i];
            for k in 0..=nc {
                row[k] = row[k].mul(&p)?.sub(&f.mul(&prow[k])?)?.div_exact(&self.denom);
            }
        }
        let f = self.obj[c].clone();
        for k in 0..=nc {
            self.obj[k] = self.obj[k].mul(&p)?.sub(&f.mul(&prow[k])?)?.div_exact(&self.denom);
        }
        self.basis[r] = c;
        if p < T::zero() {
            for row in self.rows.iter_mut() {
                row.iter_mut().for_each(|x| *x = x.neg());
            }
            self.obj.iter_mut().for_each(|x| *x = x.neg());
            self.denom = p.neg();
        } else {
            self.denom = p;
        }
        Some(())
    }

    fn drive_out_artificials(&mut self) -> Option<()> {
        for i in 0..self.rows.len() {
            if self.kinds[self.basis[i]] != ColKind::Artificial {
                continue;
            }
            let col = (0..self.ncols())
                .find(|&j| self.kinds[j] != ColKind::Artificial && self.rows[i][j] != T::zero());
            match col {
                Some(c) => self.pivot(i, c)?,
                None => self.dead[i] = true,
            }
        }
        Some(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(b(n), b(d))
    }

    #[test]
    fn small_maximization() {
        // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![b(3), b(2)];
        lp.push(vec![b(1), b(1)], Relation::Le, b(4));
        lp.push(vec![b(1), b(3)], Relation::Le, b(6));
        lp.push(vec![b(1), b(0)], Relation::Le, b(3));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, q(11, 1));
                assert_eq!(x, vec![q(3, 1), q(1, 1)]);
                assert!(lp.is_feasible(&x));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fractional_optimum_with_equalities() {
        // max x, 2x + 3y = 5, y >= 1/2 written as 2y >= 1
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![b(1), b(0)];
        lp.push(vec![b(2), b(3)], Relation::Eq, b(5));
        lp.push(vec![b(0), b(2)], Relation::Ge, b(1));
        match lp.solve() {
            LpOutcome::Optimal { x, value } => {
                assert_eq!(value, q(7, 4));
                assert_eq!(x, vec![q(7, 4), q(1, 2)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_with_certificate() {
        // x + y = 1, x + y >= 2
        let mut lp = LinearProgram::new(2);
        lp.push(vec![b(1), b(1)], Relation::Eq, b(1));
        lp.push(vec![b(1), b(1)], Relation::Ge, b(2));
        match lp.solve() {
            LpOutcome::Infeasible { farkas } => assert!(lp.is_farkas_certificate(&farkas)),
            other => panic!("{other:?}"),
        }
        // -x <= -3 with x <= 1 (negative right-hand side is flipped internally)
        let mut lp = LinearProgram::new(1);
        lp.push(vec![b(-1)], Relation::Le, b(-3));
        lp.push(vec![b(1)], Relation::Le, b(1));
        match lp.solve() {
            LpOutcome::Infeasible { farkas } => assert!(lp.is_farkas_certificate(&farkas)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![b(1), b(1)];
        lp.push(vec![b(1), b(-1)], Relation::Le, b(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(3);
        lp.objective = vec![b(1), b(2), b(3)];
        lp.push(vec![b(1), b(1), b(1)], Relation::Eq, b(1));
        lp.push(vec![b(2), b(2), b(2)], Relation::Eq, b(2));
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, q(3, 1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overflow_falls_back_to_bigint() {
        let huge = BigInt::from(i128::MAX) * b(4);
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![b(1)];
        lp.push(vec![b(3)], Relation::Le, huge.clone());
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, BigRational::new(huge, b(3))),
            other => panic!("{other:?}"),
        }
    }
}
