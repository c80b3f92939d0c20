//! Laurent polynomials in ħ with polynomial dependence on λ.
//!
//! A [`Laurent`] is a finite sum `Σ c·ħ^h·λ^l` with `h ∈ ℤ`, `l ∈ ℕ`; it is
//! the coefficient ring for every series in the pipeline. Terms are kept in
//! a `BTreeMap` keyed by `(h, l)`, and zero terms are never stored, so
//! structural equality is mathematical equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::{Coeff, CoeffMul, Module};
use crate::error::{Error, Result};
use crate::scalar::{ExactScalar, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent<F> {
    terms: BTreeMap<(i32, u32), F>,
}

impl<F: Scalar> Laurent<F> {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(F::from_int(n))
    }

    /// `c·ħ^h·λ^l`.
    pub fn monomial(c: F, h: i32, lam: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((h, lam), c);
        }
        Laurent { terms }
    }

    pub fn hbar() -> Self {
        Self::monomial(F::one(), 1, 0)
    }

    pub fn lambda() -> Self {
        Self::monomial(F::one(), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = ((i32, u32), F)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for ((h, l), c) in iter {
            out.add_term(h, l, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i32, u32), &F)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, h: i32, lam: u32) -> F {
        self.terms.get(&(h, lam)).cloned().unwrap_or_else(F::zero)
    }

    pub fn add_term(&mut self, h: i32, lam: u32, c: F) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry((h, lam)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Laurent {
            terms: self.terms.iter().map(|(k, v)| (*k, v.clone() * c.clone())).collect(),
        }
    }

    /// Multiply by `ħ^k`.
    pub fn shift_hbar(&self, k: i32) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(&(h, l), v)| ((h + k, l), v.clone())).collect(),
        }
    }

    pub fn min_hbar(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).min()
    }

    pub fn max_hbar(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn max_lambda(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    /// True when every term has `h = 0` (λ may still appear).
    pub fn is_hbar_free(&self) -> bool {
        self.terms.keys().all(|k| k.0 == 0)
    }

    /// The single field value of an ħ- and λ-free element.
    pub fn as_constant(&self) -> Option<F> {
        match self.terms.len() {
            0 => Some(F::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    /// Projection onto nonnegative powers of ħ.
    pub fn pi_plus(&self) -> Self {
        Laurent {
            terms: self
                .terms
                .range((0, 0)..)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Part with strictly negative ħ powers; `x = x.pi_plus() + x.pi_minus()`.
    pub fn pi_minus(&self) -> Self {
        Laurent {
            terms: self
                .terms
                .range(..(0, 0))
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    /// Part of total ħ-degree exactly `h`, returned as a λ-polynomial at `ħ^0`.
    pub fn hbar_part(&self, h: i32) -> Self {
        Laurent {
            terms: self
                .terms
                .range((h, 0)..(h + 1, 0))
                .map(|(&(_, l), v)| ((0, l), v.clone()))
                .collect(),
        }
    }

    /// Substitute `ħ := value`.
    pub fn hbar_specialize(&self, value: &F) -> Result<Self> {
        if value.is_zero() {
            if let Some(h) = self.min_hbar().filter(|&h| h < 0) {
                return Err(Error::NegativeHbarPole(h));
            }
            return Ok(self.hbar_part(0));
        }
        let mut out = Self::zero();
        for (&(h, l), c) in &self.terms {
            out.add_term(0, l, c.clone() * pow_int(value, h));
        }
        Ok(out)
    }

    /// Substitute `λ := 0`.
    pub fn lambda_zero(&self) -> Self {
        Laurent {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.1 == 0)
                .map(|(k, v)| (*k, v.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Laurent<G> {
        Laurent::from_terms(self.terms.iter().map(|(k, v)| (*k, f(v))))
    }
}

fn pow_int<F: Scalar>(x: &F, e: i32) -> F {
    let mut acc = F::one();
    for _ in 0..e.unsigned_abs() {
        acc = acc * x.clone();
    }
    if e < 0 {
        F::one() / acc
    } else {
        acc
    }
}

impl<F: Scalar> Coeff for Laurent<F> {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_assign_ref(&mut self, other: &Self) {
        for (&(h, l), c) in &other.terms {
            self.add_term(h, l, c.clone());
        }
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        for (&(h, l), c) in &other.terms {
            self.add_term(h, l, -c.clone());
        }
    }

    fn negate(&self) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl<F: Scalar> CoeffMul for Laurent<F> {
    fn mul_ref(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        if self.is_zero() || other.is_zero() {
            return out;
        }
        for (&(h1, l1), c1) in &self.terms {
            for (&(h2, l2), c2) in &other.terms {
                out.add_term(h1 + h2, l1 + l2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<F: Scalar> Module for Laurent<F> {
    type Field = F;

    fn scale_by(&self, c: &Laurent<F>) -> Self {
        self.mul_ref(c)
    }
}

impl<F: Scalar> Add for &Laurent<F> {
    type Output = Laurent<F>;
    fn add(self, rhs: &Laurent<F>) -> Laurent<F> {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<F: Scalar> Sub for &Laurent<F> {
    type Output = Laurent<F>;
    fn sub(self, rhs: &Laurent<F>) -> Laurent<F> {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl<F: Scalar> Mul for &Laurent<F> {
    type Output = Laurent<F>;
    fn mul(self, rhs: &Laurent<F>) -> Laurent<F> {
        self.mul_ref(rhs)
    }
}

impl<F: Scalar> Neg for &Laurent<F> {
    type Output = Laurent<F>;
    fn neg(self) -> Laurent<F> {
        self.negate()
    }
}

impl<F: Scalar> Add for Laurent<F> {
    type Output = Laurent<F>;
    fn add(mut self, rhs: Laurent<F>) -> Laurent<F> {
        self.add_assign_ref(&rhs);
        self
    }
}

impl<F: Scalar> Sub for Laurent<F> {
    type Output = Laurent<F>;
    fn sub(mut self, rhs: Laurent<F>) -> Laurent<F> {
        self.sub_assign_ref(&rhs);
        self
    }
}

impl<F: Scalar> Mul for Laurent<F> {
    type Output = Laurent<F>;
    fn mul(self, rhs: Laurent<F>) -> Laurent<F> {
        self.mul_ref(&rhs)
    }
}

impl<F: Scalar> fmt::Debug for Laurent<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(h, l), c)| format!("({c:?})h^{h}l^{l}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<F: ExactScalar> fmt::Display for Laurent<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest ħ power first
        for (i, (&(h, l), c)) in self.terms.iter().rev().enumerate() {
            let mut text = c.to_text();
            let negative = text.starts_with('-');
            if negative {
                text.remove(0);
            }
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { '-' } else { '+' })?;
            }
            let mut factors = Vec::new();
            if text != "1" || (h == 0 && l == 0) {
                factors.push(text);
            }
            match h {
                0 => {}
                1 => factors.push("h".into()),
                _ => factors.push(format!("h^{h}")),
            }
            match l {
                0 => {}
                1 => factors.push("lam".into()),
                _ => factors.push(format!("lam^{l}")),
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type L = Laurent<Rational>;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    fn l(terms: &[(i32, u32, i64)]) -> L {
        L::from_terms(terms.iter().map(|&(h, lam, c)| ((h, lam), q(c))))
    }

    #[test]
    fn pi_plus_examples() {
        assert_eq!(l(&[(2, 0, 3), (0, 0, 5), (-1, 0, -7)]).pi_plus(), l(&[(2, 0, 3), (0, 0, 5)]));
        assert!(l(&[(-3, 0, 1)]).pi_plus().is_zero());
        assert_eq!(l(&[(1, 1, 1), (-2, 2, -1)]).pi_plus(), l(&[(1, 1, 1)]));
    }

    #[test]
    fn specialize_examples() {
        let x = l(&[(0, 0, 2), (1, 0, 5)]);
        assert_eq!(x.hbar_specialize(&q(0)).unwrap(), L::from_int(2));
        assert_eq!(x.hbar_specialize(&q(1)).unwrap(), L::from_int(7));
        assert_eq!(
            l(&[(-1, 0, 1)]).hbar_specialize(&q(0)),
            Err(Error::NegativeHbarPole(-1))
        );
        let y = l(&[(-2, 1, 8)]);
        assert_eq!(y.hbar_specialize(&q(2)).unwrap(), l(&[(0, 1, 2)]));
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = l(&[(1, 0, 1), (-1, 0, 1)]);
        let y = l(&[(1, 0, -1)]);
        assert_eq!(&x + &y, l(&[(-1, 0, 1)]));
        assert!((&x - &x).is_zero());
        // (ħ + ħ⁻¹)(ħ − ħ⁻¹) = ħ² − ħ⁻²
        let z = &x * &l(&[(1, 0, 1), (-1, 0, -1)]);
        assert_eq!(z, l(&[(2, 0, 1), (-2, 0, -1)]));
    }

    #[test]
    fn display() {
        assert_eq!(l(&[(2, 0, 3), (0, 0, 5), (-1, 0, -7)]).to_string(), "3*h^2 + 5 - 7*h^-1");
        assert_eq!(l(&[(1, 1, 1)]).to_string(), "h*lam");
        assert_eq!(L::zero().to_string(), "0");
    }
}
