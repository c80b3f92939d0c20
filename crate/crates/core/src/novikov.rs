//! Truncated formal series in the Novikov variables `Q^1, …, Q^r`.
//!
//! Keys are effective degrees `d ∈ ℕ^r`; a series only ever stores keys with
//! weighted degree `Σ w_a d_a ≤ D`, and products silently drop anything
//! beyond `D`. Zero coefficients are not stored.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{Coeff, CoeffMul, Module};
use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Exponent vector `d` of the monomial `Q^d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NovikovExponent(pub Vec<u32>);

impl NovikovExponent {
    pub fn zero(r: usize) -> Self {
        NovikovExponent(vec![0; r])
    }

    pub fn unit(r: usize, a: usize) -> Self {
        let mut d = vec![0; r];
        d[a] = 1;
        NovikovExponent(d)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        NovikovExponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self − other` when componentwise nonnegative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(NovikovExponent)
    }

    /// Integer pairing `⟨u, d⟩ = Σ u_a d_a`.
    pub fn pair(&self, row: &[i64]) -> i64 {
        self.0.iter().zip(row).map(|(&d, &u)| d as i64 * u).sum()
    }

    /// Nonzero exponents `f` with `f ≤ self` componentwise.
    pub fn proper_divisors(&self) -> Vec<NovikovExponent> {
        let mut out = vec![Vec::new()];
        for &k in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=k).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out.into_iter()
            .map(NovikovExponent)
            .filter(|f| !f.is_zero())
            .collect()
    }
}

impl fmt::Debug for NovikovExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Weighted total-degree truncation `Σ w_a d_a ≤ order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Truncation {
    order: u32,
    weights: Vec<u32>,
}

impl Truncation {
    pub fn new(order: u32, weights: Vec<u32>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Config("at least one Novikov variable is required".into()));
        }
        if weights.contains(&0) {
            return Err(Error::Config("Novikov weights must be positive".into()));
        }
        Ok(Truncation { order, weights })
    }

    /// All weights equal to one.
    pub fn uniform(rank: usize, order: u32) -> Self {
        Truncation {
            order,
            weights: vec![1; rank],
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn with_order(&self, order: u32) -> Self {
        Truncation {
            order,
            weights: self.weights.clone(),
        }
    }

    pub fn degree(&self, d: &NovikovExponent) -> u32 {
        d.0.iter().zip(&self.weights).map(|(x, w)| x * w).sum()
    }

    pub fn admits(&self, d: &NovikovExponent) -> bool {
        d.rank() == self.rank() && self.degree(d) <= self.order
    }

    /// Every retained exponent, sorted by weighted degree and then
    /// lexicographically. Recursions over `d` walk this list.
    pub fn exponents(&self) -> Vec<NovikovExponent> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; self.rank()];
        self.enumerate(0, 0, &mut cur, &mut out);
        out.sort_by(|a, b| self.degree(a).cmp(&self.degree(b)).then_with(|| a.cmp(b)));
        out
    }

    fn enumerate(&self, idx: usize, used: u32, cur: &mut Vec<u32>, out: &mut Vec<NovikovExponent>) {
        if idx == self.rank() {
            out.push(NovikovExponent(cur.clone()));
            return;
        }
        let w = self.weights[idx];
        let mut k = 0;
        while used + k * w <= self.order {
            cur[idx] = k;
            self.enumerate(idx + 1, used + k * w, cur, out);
            k += 1;
        }
        cur[idx] = 0;
    }
}

/// Truncated series `Σ_d c_d Q^d`.
#[derive(Clone, PartialEq)]
pub struct NovikovSeries<T> {
    trunc: Truncation,
    coeffs: BTreeMap<NovikovExponent, T>,
}

impl<T: Coeff> NovikovSeries<T> {
    pub fn zero(trunc: Truncation) -> Self {
        NovikovSeries {
            trunc,
            coeffs: BTreeMap::new(),
        }
    }

    /// The series with the single term `c·Q^0`.
    pub fn constant(trunc: Truncation, c: T) -> Self {
        let mut s = Self::zero(trunc);
        let d = NovikovExponent::zero(s.trunc.rank());
        s.add_term(d, c);
        s
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, d: &NovikovExponent) -> Option<&T> {
        self.coeffs.get(d)
    }

    pub fn constant_term(&self) -> Option<&T> {
        self.coeffs.get(&NovikovExponent::zero(self.trunc.rank()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NovikovExponent, &T)> {
        self.coeffs.iter()
    }

    /// Add `c·Q^d`; terms beyond the truncation are dropped.
    pub fn add_term(&mut self, d: NovikovExponent, c: T) {
        if c.is_zero() || !self.trunc.admits(&d) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.coeffs.entry(d) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Replace the coefficient at `d`.
    pub fn set(&mut self, d: NovikovExponent, c: T) {
        if !self.trunc.admits(&d) {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&d);
        } else {
            self.coeffs.insert(d, c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (d, c) in &other.coeffs {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (d, c) in &other.coeffs {
            out.add_term(d.clone(), c.negate());
        }
        out
    }

    pub fn negate(&self) -> Self {
        self.map(|c| c.negate())
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> NovikovSeries<U> {
        self.map_with_exponent(|_, c| f(c))
    }

    pub fn map_with_exponent<U: Coeff>(&self, f: impl Fn(&NovikovExponent, &T) -> U) -> NovikovSeries<U> {
        let mut out = NovikovSeries::zero(self.trunc.clone());
        for (d, c) in &self.coeffs {
            out.add_term(d.clone(), f(d, c));
        }
        out
    }

    pub fn try_map<U: Coeff>(&self, f: impl Fn(&T) -> Result<U>) -> Result<NovikovSeries<U>> {
        let mut out = NovikovSeries::zero(self.trunc.clone());
        for (d, c) in &self.coeffs {
            out.add_term(d.clone(), f(c)?);
        }
        Ok(out)
    }

    /// Bilinear product `Σ_{d,e} f(a_d, b_e) Q^{d+e}`.
    pub fn mul_with<U: Coeff, V: Coeff>(
        &self,
        other: &NovikovSeries<U>,
        f: impl Fn(&T, &U) -> V,
    ) -> NovikovSeries<V> {
        assert_eq!(self.trunc, other.trunc, "truncation mismatch");
        let mut out = NovikovSeries::zero(self.trunc.clone());
        for (d1, c1) in &self.coeffs {
            let deg1 = self.trunc.degree(d1);
            for (d2, c2) in &other.coeffs {
                if deg1 + self.trunc.degree(d2) > self.trunc.order {
                    continue;
                }
                out.add_term(d1.add(d2), f(c1, c2));
            }
        }
        out
    }

    /// Same series at a lower (or equal) truncation order.
    pub fn truncate(&self, order: u32) -> Self {
        let trunc = self.trunc.with_order(order.min(self.trunc.order));
        let mut out = Self::zero(trunc);
        for (d, c) in &self.coeffs {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    /// Re-home the series in a larger truncation (no new terms appear).
    pub fn extend(&self, trunc: &Truncation) -> Self {
        let mut out = Self::zero(trunc.clone());
        for (d, c) in &self.coeffs {
            out.add_term(d.clone(), c.clone());
        }
        out
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.trunc, other.trunc, "truncation mismatch");
    }
}

impl<T: CoeffMul> NovikovSeries<T> {
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_with(other, |a, b| a.mul_ref(b))
    }

    pub fn pow(&self, k: u32, one: T) -> Self {
        let mut acc = Self::constant(self.trunc.clone(), one);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl<T: Coeff> Coeff for NovikovSeries<T> {
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_assign_ref(&mut self, other: &Self) {
        self.check_compatible(other);
        for (d, c) in &other.coeffs {
            self.add_term(d.clone(), c.clone());
        }
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        self.check_compatible(other);
        for (d, c) in &other.coeffs {
            self.add_term(d.clone(), c.negate());
        }
    }

    fn negate(&self) -> Self {
        NovikovSeries::negate(self)
    }
}

impl<T: CoeffMul> CoeffMul for NovikovSeries<T> {
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

impl<T: Module> Module for NovikovSeries<T> {
    type Field = T::Field;

    fn scale_by(&self, c: &Laurent<T::Field>) -> Self {
        self.map(|x| x.scale_by(c))
    }
}

/// Series over scalar coefficients, used for mirror maps and substitutions.
pub type ScalarSeries<F> = NovikovSeries<Laurent<F>>;

impl<T: Module> NovikovSeries<T> {
    /// `Q^a ∂/∂Q^a`.
    pub fn q_derivative(&self, a: usize) -> Self {
        self.map_with_exponent(|d, c| c.scale_by(&Laurent::from_int(d.0[a] as i64)))
    }

    /// Multiply by a scalar series.
    pub fn mul_scalar_series(&self, s: &ScalarSeries<T::Field>) -> Self {
        s.mul_with(self, |a, b| b.scale_by(a))
    }

    /// Substitute `Q^a := subs[a]`, where every `subs[a]` has zero constant
    /// term. The result lives in the truncation of the substituted series.
    pub fn compose(&self, subs: &[ScalarSeries<T::Field>]) -> Self {
        assert_eq!(subs.len(), self.trunc.rank());
        let target = subs[0].truncation().clone();
        let one = Laurent::<T::Field>::one();
        // cache powers of each substituted variable
        let mut powers: Vec<Vec<ScalarSeries<T::Field>>> = subs
            .iter()
            .map(|s| vec![ScalarSeries::constant(target.clone(), one.clone()), s.clone()])
            .collect();
        let mut out = Self::zero(target.clone());
        for (d, c) in &self.coeffs {
            let mut monomial = ScalarSeries::constant(target.clone(), one.clone());
            for (a, &k) in d.0.iter().enumerate() {
                while powers[a].len() <= k as usize {
                    let next = powers[a].last().unwrap().mul(&subs[a]);
                    powers[a].push(next);
                }
                monomial = monomial.mul(&powers[a][k as usize]);
                if monomial.is_zero() {
                    break;
                }
            }
            for (e, m) in monomial.iter() {
                out.add_term(e.clone(), c.scale_by(m));
            }
        }
        out
    }
}

impl<F: Scalar> ScalarSeries<F> {
    /// The monomial `Q^d` with coefficient one.
    pub fn monomial(trunc: Truncation, d: NovikovExponent) -> Self {
        let mut s = Self::zero(trunc);
        s.add_term(d, Laurent::one());
        s
    }

    /// `exp(self)` for a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        if self.constant_term().is_some() {
            return Err(Error::Invariant("exp needs a series with zero constant term".into()));
        }
        let mut term = Self::constant(self.trunc.clone(), Laurent::one());
        let mut out = term.clone();
        let mut k = 1i64;
        loop {
            term = term.mul(self).scale_by(&Laurent::constant(F::ratio(1, k)));
            if term.is_zero() {
                return Ok(out);
            }
            out = out.add(&term);
            k += 1;
        }
    }
}

/// Units usable as constant terms in [`NovikovSeries::invert`].
pub trait Invertible: CoeffMul {
    fn try_inverse(&self) -> Result<Self>;
}

impl<F: Scalar> Invertible for Matrix<F> {
    fn try_inverse(&self) -> Result<Self> {
        Matrix::try_inverse(self)
    }
}

impl<F: Scalar> Invertible for Laurent<F> {
    fn try_inverse(&self) -> Result<Self> {
        let mut terms = self.terms();
        match (terms.next(), terms.next()) {
            (Some(((h, 0), c)), None) => Ok(Laurent::monomial(F::one() / c.clone(), -h, 0)),
            _ => Err(Error::NonInvertibleConstantTerm),
        }
    }
}

impl<T: Invertible> NovikovSeries<T> {
    /// Two-sided inverse through the truncation order.
    ///
    /// `T_0 = S_0^{-1}` and `T_d = −S_0^{-1} Σ_{0<f≤d} S_f T_{d−f}`.
    pub fn invert(&self) -> Result<Self> {
        let c0 = self.constant_term().ok_or(Error::NonInvertibleConstantTerm)?;
        let c0_inv = c0.try_inverse()?;
        let mut out = Self::zero(self.trunc.clone());
        for d in self.trunc.exponents() {
            if d.is_zero() {
                out.set(d, c0_inv.clone());
                continue;
            }
            let mut acc: Option<T> = None;
            for f in d.proper_divisors() {
                let (Some(s_f), Some(t_rest)) = (self.get(&f), out.get(&d.checked_sub(&f).unwrap())) else {
                    continue;
                };
                let prod = s_f.mul_ref(t_rest);
                match acc.as_mut() {
                    Some(a) => a.add_assign_ref(&prod),
                    None => acc = Some(prod),
                }
            }
            if let Some(a) = acc {
                out.set(d, c0_inv.mul_ref(&a).negate());
            }
        }
        Ok(out)
    }
}

impl<T: fmt::Debug> fmt::Debug for NovikovSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coeffs.iter()).finish()
    }
}
