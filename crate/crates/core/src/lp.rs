//! Two-phase revised simplex over `f64` or exact rationals.
//!
//! Standard form: minimise `c·x` subject to `A x = b`, `x >= 0`. Columns are
//! sparse. Pricing is Dantzig's rule with a permanent switch to Bland's rule
//! after a run of degenerate pivots, which rules out cycling.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    /// Sign tests are tolerance-aware for floating point.
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn is_nonzero(&self) -> bool {
        self.is_pos() || self.is_neg()
    }
    fn is_exact_zero(&self) -> bool;
    fn abs_val(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Whether the inverse should be rebuilt from scratch every so often.
    const INEXACT: bool;
}

const F64_EPS: f64 = 1e-11;

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn is_pos(&self) -> bool {
        *self > F64_EPS
    }
    fn is_neg(&self) -> bool {
        *self < -F64_EPS
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    const INEXACT: bool = true;
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    const INEXACT: bool = false;
}

/// Best rational approximation with denominator at most `max_den`
/// (continued fractions).
pub fn rational_approx(x: f64, max_den: i64) -> BigRational {
    assert!(x.is_finite());
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        let h2 = ai * h1 + h0;
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac.abs() < 1e-18 {
            break;
        }
        v = 1.0 / frac;
    }
    BigRational::new(BigInt::from(h1), BigInt::from(k1))
}

/// Converts a float to the simplest nearby rational, falling back to its
/// exact binary value when no small denominator is within `1e-12`.
pub fn to_rational(x: f64) -> BigRational {
    let r = rational_approx(x, 1_000_000);
    if (ToPrimitive::to_f64(&r).unwrap_or(f64::NAN) - x).abs() <= 1e-12 {
        r
    } else {
        BigRational::from_float(x).expect("finite")
    }
}

pub type SparseColumn<S> = Vec<(usize, S)>;

#[derive(Debug, Clone)]
pub struct LinearProgram<S> {
    pub rows: usize,
    pub columns: Vec<SparseColumn<S>>,
    pub rhs: Vec<S>,
    /// Empty means a pure feasibility problem.
    pub cost: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { x: Vec<S>, objective: S },
    Infeasible,
    Unbounded,
}

impl<S> LpOutcome<S> {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub max_iterations: usize,
    /// Rebuild the basis inverse this often (floating point only).
    pub refactor_every: usize,
    /// Degenerate pivots tolerated before switching to Bland's rule.
    pub bland_after: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200_000,
            refactor_every: 64,
            bland_after: 50,
        }
    }
}

impl<S: Scalar> LinearProgram<S> {
    pub fn new(rows: usize) -> Self {
        Self {
            rows,
            columns: Vec::new(),
            rhs: vec![S::zero(); rows],
            cost: Vec::new(),
        }
    }

    pub fn add_column(&mut self, col: SparseColumn<S>, cost: Option<S>) -> usize {
        if let Some(c) = cost {
            self.cost.resize(self.columns.len(), S::zero());
            self.cost.push(c);
        } else if !self.cost.is_empty() {
            self.cost.push(S::zero());
        }
        self.columns.push(col);
        self.columns.len() - 1
    }

    pub fn solve(&self) -> Result<LpOutcome<S>> {
        self.solve_with(LpOptions::default())
    }

    pub fn solve_with(&self, opts: LpOptions) -> Result<LpOutcome<S>> {
        for col in &self.columns {
            if let Some(&(r, _)) = col.iter().find(|(r, _)| *r >= self.rows) {
                return Err(Error::DimensionMismatch {
                    what: "LP column row index",
                    expected: self.rows,
                    found: r,
                });
            }
        }
        if self.rhs.len() != self.rows {
            return Err(Error::DimensionMismatch {
                what: "LP right-hand side",
                expected: self.rows,
                found: self.rhs.len(),
            });
        }
        Tableau::new(self, opts).run(self)
    }
}

struct Tableau<S> {
    m: usize,
    nstruct: usize,
    cols: Vec<SparseColumn<S>>,
    b: Vec<S>,
    basis: Vec<usize>,
    binv: Vec<S>,
    xb: Vec<S>,
    opts: LpOptions,
}

impl<S: Scalar> Tableau<S> {
    fn new(lp: &LinearProgram<S>, opts: LpOptions) -> Self {
        let m = lp.rows;
        let flip: Vec<bool> = lp.rhs.iter().map(|v| v.to_f64() < 0.0).collect();
        let sign = |r: usize, v: &S| if flip[r] { -v.clone() } else { v.clone() };
        let mut cols: Vec<SparseColumn<S>> = lp
            .columns
            .iter()
            .map(|c| c.iter().map(|(r, v)| (*r, sign(*r, v))).collect())
            .collect();
        let nstruct = cols.len();
        for r in 0..m {
            cols.push(vec![(r, S::one())]);
        }
        let b: Vec<S> = lp.rhs.iter().enumerate().map(|(r, v)| sign(r, v)).collect();
        let mut binv = vec![S::zero(); m * m];
        for r in 0..m {
            binv[r * m + r] = S::one();
        }
        Self {
            m,
            nstruct,
            basis: (nstruct..nstruct + m).collect(),
            xb: b.clone(),
            b,
            cols,
            binv,
            opts,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.nstruct
    }

    fn run(mut self, lp: &LinearProgram<S>) -> Result<LpOutcome<S>> {
        // Phase 1: minimise the sum of artificials.
        let phase1: Vec<S> = (0..self.nstruct + self.m)
            .map(|j| if self.is_artificial(j) { S::one() } else { S::zero() })
            .collect();
        match self.optimise(&phase1)? {
            Phase::Optimal => {}
            // Impossible in exact arithmetic; only rounding gets here.
            Phase::Unbounded => {
                return Err(Error::NumericFailure {
                    message: "phase 1 reported unbounded (numerical breakdown)".into(),
                    residual: f64::NAN,
                })
            }
        }
        let infeas = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(&j, _)| self.is_artificial(j))
            .fold(S::zero(), |acc, (_, v)| acc + v.clone());
        if infeas.is_pos() {
            return Ok(LpOutcome::Infeasible);
        }
        self.drive_out_artificials();
        if lp.cost.is_empty() || lp.cost.iter().all(|c| !c.is_nonzero()) {
            let x = self.primal();
            return Ok(LpOutcome::Optimal {
                x,
                objective: S::zero(),
            });
        }
        let mut cost = lp.cost.clone();
        cost.resize(self.nstruct, S::zero());
        cost.extend((0..self.m).map(|_| S::zero()));
        match self.optimise(&cost)? {
            Phase::Unbounded => Ok(LpOutcome::Unbounded),
            Phase::Optimal => {
                let x = self.primal();
                let objective = x
                    .iter()
                    .zip(&cost)
                    .fold(S::zero(), |acc, (a, c)| acc + a.clone() * c.clone());
                Ok(LpOutcome::Optimal { x, objective })
            }
        }
    }

    fn primal(&self) -> Vec<S> {
        let mut x = vec![S::zero(); self.nstruct];
        for (r, &j) in self.basis.iter().enumerate() {
            if j < self.nstruct {
                // Clamp floating-point dust below zero.
                x[j] = if self.xb[r].is_neg() || !self.xb[r].is_nonzero() {
                    S::zero()
                } else {
                    self.xb[r].clone()
                };
            }
        }
        x
    }

    /// `B^{-1} a_j`.
    fn ftran(&self, j: usize) -> Vec<S> {
        let m = self.m;
        let mut w = vec![S::zero(); m];
        for (r, v) in &self.cols[j] {
            for (i, wi) in w.iter_mut().enumerate() {
                let bij = &self.binv[i * m + r];
                if !bij.is_exact_zero() {
                    *wi = wi.clone() + bij.clone() * v.clone();
                }
            }
        }
        w
    }

    fn duals(&self, cost: &[S]) -> Vec<S> {
        let m = self.m;
        let mut y = vec![S::zero(); m];
        for (r, &j) in self.basis.iter().enumerate() {
            let c = &cost[j];
            if c.is_exact_zero() {
                continue;
            }
            for (k, yk) in y.iter_mut().enumerate() {
                *yk = yk.clone() + c.clone() * self.binv[r * m + k].clone();
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[S], y: &[S]) -> S {
        self.cols[j]
            .iter()
            .fold(cost[j].clone(), |acc, (r, v)| acc - y[*r].clone() * v.clone())
    }

    fn optimise(&mut self, cost: &[S]) -> Result<Phase> {
        let mut in_basis = vec![false; self.cols.len()];
        for &j in &self.basis {
            in_basis[j] = true;
        }
        let mut bland = false;
        let mut degenerate_run = 0usize;
        for iter in 0..self.opts.max_iterations {
            if S::INEXACT && iter > 0 && iter % self.opts.refactor_every == 0 {
                self.refactor()?;
            }
            let y = self.duals(cost);
            let mut entering = None;
            let mut best = S::zero();
            for j in 0..self.cols.len() {
                // Artificials never re-enter once they have left.
                if in_basis[j] || self.is_artificial(j) {
                    continue;
                }
                let d = self.reduced_cost(j, cost, &y);
                if d.is_neg() {
                    if bland {
                        entering = Some(j);
                        break;
                    }
                    if entering.is_none() || d < best {
                        best = d;
                        entering = Some(j);
                    }
                }
            }
            let Some(j) = entering else {
                return Ok(Phase::Optimal);
            };
            let w = self.ftran(j);
            let mut leave: Option<(usize, S)> = None;
            for (r, wr) in w.iter().enumerate() {
                if !wr.is_pos() {
                    continue;
                }
                let ratio = self.xb[r].clone() / wr.clone();
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        let diff = ratio.clone() - lratio.clone();
                        diff.is_neg()
                            || (!diff.is_nonzero() && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, ratio)) = leave else {
                return Ok(Phase::Unbounded);
            };
            if ratio.is_nonzero() {
                degenerate_run = 0;
            } else {
                degenerate_run += 1;
                if degenerate_run > self.opts.bland_after {
                    bland = true;
                }
            }
            in_basis[self.basis[r]] = false;
            in_basis[j] = true;
            self.pivot(r, j, &w);
        }
        Err(Error::NumericFailure {
            message: format!("simplex exceeded {} iterations", self.opts.max_iterations),
            residual: f64::NAN,
        })
    }

    fn pivot(&mut self, r: usize, j: usize, w: &[S]) {
        let m = self.m;
        let piv = w[r].clone();
        for k in 0..m {
            let v = self.binv[r * m + k].clone() / piv.clone();
            self.binv[r * m + k] = v;
        }
        self.xb[r] = self.xb[r].clone() / piv;
        for i in 0..m {
            if i == r || w[i].is_exact_zero() {
                continue;
            }
            let f = w[i].clone();
            for k in 0..m {
                let v = self.binv[r * m + k].clone();
                if v.is_exact_zero() {
                    continue;
                }
                self.binv[i * m + k] = self.binv[i * m + k].clone() - f.clone() * v;
            }
            self.xb[i] = self.xb[i].clone() - f * self.xb[r].clone();
        }
        self.basis[r] = j;
    }

    /// Rebuilds `B^{-1}` and `x_B` by Gauss–Jordan elimination.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m;
        let mut a = vec![S::zero(); m * m];
        for (c, &j) in self.basis.iter().enumerate() {
            for (r, v) in &self.cols[j] {
                a[r * m + c] = v.clone();
            }
        }
        let mut inv = vec![S::zero(); m * m];
        for r in 0..m {
            inv[r * m + r] = S::one();
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&x, &y| {
                    a[x * m + c]
                        .abs_val()
                        .partial_cmp(&a[y * m + c].abs_val())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("nonempty");
            if a[p * m + c].abs_val().to_f64() < 1e-14 {
                return Err(Error::NumericFailure {
                    message: "singular basis during refactorisation".into(),
                    residual: a[p * m + c].abs_val().to_f64(),
                });
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let d = a[c * m + c].clone();
            for k in 0..m {
                a[c * m + k] = a[c * m + k].clone() / d.clone();
                inv[c * m + k] = inv[c * m + k].clone() / d.clone();
            }
            for i in 0..m {
                if i == c {
                    continue;
                }
                let f = a[i * m + c].clone();
                if f.is_exact_zero() {
                    continue;
                }
                for k in 0..m {
                    a[i * m + k] = a[i * m + k].clone() - f.clone() * a[c * m + k].clone();
                    inv[i * m + k] = inv[i * m + k].clone() - f.clone() * inv[c * m + k].clone();
                }
            }
        }
        // Row order of `inv` matches the basis positions after the swaps
        // because we eliminated B·X = I column by column.
        self.binv = inv;
        self.xb = (0..m)
            .map(|i| {
                (0..m).fold(S::zero(), |acc, k| {
                    acc + self.binv[i * m + k].clone() * self.b[k].clone()
                })
            })
            .collect();
        Ok(())
    }

    /// Swaps zero-level artificials out of the basis where some structural
    /// column can take their place; the rest sit on redundant rows.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let in_basis: Vec<bool> = {
                let mut v = vec![false; self.cols.len()];
                for &j in &self.basis {
                    v[j] = true;
                }
                v
            };
            let m = self.m;
            let candidate = (0..self.nstruct).find(|&j| {
                !in_basis[j]
                    && self.cols[j]
                        .iter()
                        .fold(S::zero(), |acc, (k, v)| {
                            acc + self.binv[r * m + k].clone() * v.clone()
                        })
                        .is_nonzero()
            });
            if let Some(j) = candidate {
                let w = self.ftran(j);
                self.pivot(r, j, &w);
            }
        }
    }
}

enum Phase {
    Optimal,
    Unbounded,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn approximations() {
        assert_eq!(rational_approx(0.4, 1000), q(2, 5));
        assert_eq!(rational_approx(1.0 / 3.0, 1000), q(1, 3));
        assert_eq!(to_rational(2.0 / 3.0), q(2, 3));
        assert_eq!(to_rational(0.0), q(0, 1));
        let pi = to_rational(std::f64::consts::PI);
        assert!((ToPrimitive::to_f64(&pi).unwrap() - std::f64::consts::PI).abs() < 1e-12);
    }

    /// min -x - y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6.
    fn small<S: Scalar>() -> LinearProgram<S> {
        let i = S::from_i64;
        let mut lp = LinearProgram::new(2);
        lp.rhs = vec![i(4), i(6)];
        lp.add_column(vec![(0, i(1)), (1, i(3))], Some(i(-1)));
        lp.add_column(vec![(0, i(2)), (1, i(1))], Some(i(-1)));
        lp.add_column(vec![(0, i(1))], Some(i(0)));
        lp.add_column(vec![(1, i(1))], Some(i(0)));
        lp
    }

    #[test]
    fn optimum_exact_and_float() {
        match small::<BigRational>().solve().unwrap() {
            LpOutcome::Optimal { x, objective } => {
                assert_eq!(objective, q(-14, 5));
                assert_eq!(x[0], q(8, 5));
                assert_eq!(x[1], q(6, 5));
            }
            o => panic!("{o:?}"),
        }
        match small::<f64>().solve().unwrap() {
            LpOutcome::Optimal { objective, .. } => assert!((objective + 2.8).abs() < 1e-12),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        // x + y = -1 with x, y >= 0.
        let mut lp = LinearProgram::<BigRational>::new(1);
        lp.rhs = vec![q(-1, 1)];
        lp.add_column(vec![(0, q(1, 1))], None);
        lp.add_column(vec![(0, q(1, 1))], None);
        assert_eq!(lp.solve().unwrap(), LpOutcome::Infeasible);
        // min -x s.t. x - y = 0.
        let mut lp = LinearProgram::<f64>::new(1);
        lp.add_column(vec![(0, 1.0)], Some(-1.0));
        lp.add_column(vec![(0, -1.0)], Some(0.0));
        assert_eq!(lp.solve().unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        // x + y = 1 stated twice, plus x = 1/4.
        let mut lp = LinearProgram::<BigRational>::new(3);
        lp.rhs = vec![q(1, 1), q(1, 1), q(1, 4)];
        lp.add_column(vec![(0, q(1, 1)), (1, q(1, 1)), (2, q(1, 1))], None);
        lp.add_column(vec![(0, q(1, 1)), (1, q(1, 1))], None);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { x, .. } => assert_eq!(x, vec![q(1, 4), q(3, 4)]),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic Beale cycling example under Dantzig's rule.
        let mut lp = LinearProgram::<BigRational>::new(3);
        lp.rhs = vec![q(0, 1), q(0, 1), q(1, 1)];
        let cols = [
            (vec![(0, q(1, 4)), (1, q(1, 2))], q(-3, 4)),
            (vec![(0, q(-8, 1)), (1, q(-12, 1))], q(20, 1)),
            (vec![(0, q(-1, 1)), (1, q(-1, 2)), (2, q(1, 1))], q(-1, 2)),
            (vec![(0, q(9, 1)), (1, q(3, 1))], q(6, 1)),
            (vec![(0, q(1, 1))], q(0, 1)),
            (vec![(1, q(1, 1))], q(0, 1)),
            (vec![(2, q(1, 1))], q(0, 1)),
        ];
        for (c, k) in cols {
            lp.add_column(c, Some(k));
        }
        match lp.solve().unwrap() {
            LpOutcome::Optimal { objective, .. } => assert_eq!(objective, q(-5, 4)),
            o => panic!("{o:?}"),
        }
    }
}
