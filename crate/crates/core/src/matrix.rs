//! Dense square matrices and vectors over [`Laurent`] coefficients.

use std::fmt;

use crate::algebra::{Coeff, CoeffMul, Module};
use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::scalar::{ExactScalar, Scalar};

/// Column vector of Laurent coefficients, indexed by the cohomology basis.
#[derive(Clone, PartialEq, Eq)]
pub struct Vector<F> {
    entries: Vec<Laurent<F>>,
}

impl<F: Scalar> Vector<F> {
    pub fn zeros(n: usize) -> Self {
        Vector { entries: vec![Laurent::zero(); n] }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[i] = Laurent::one();
        v
    }

    pub fn from_entries(entries: Vec<Laurent<F>>) -> Self {
        Vector { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Laurent<F>] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &Laurent<F> {
        &self.entries[i]
    }

    pub fn set(&mut self, i: usize, value: Laurent<F>) {
        self.entries[i] = value;
    }

    pub fn scale(&self, c: &Laurent<F>) -> Self {
        Vector {
            entries: self.entries.iter().map(|e| e.mul_ref(c)).collect(),
        }
    }

    pub fn pi_plus(&self) -> Self {
        Vector {
            entries: self.entries.iter().map(Laurent::pi_plus).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(&Laurent<F>) -> Laurent<F>) -> Self {
        Vector {
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl<F: Scalar> Coeff for Vector<F> {
    fn is_zero(&self) -> bool {
        self.entries.iter().all(Laurent::is_zero)
    }

    fn add_assign_ref(&mut self, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            a.add_assign_ref(b);
        }
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            a.sub_assign_ref(b);
        }
    }

    fn negate(&self) -> Self {
        self.map(Laurent::negate)
    }
}

impl<F: Scalar> Module for Vector<F> {
    type Field = F;

    fn scale_by(&self, c: &Laurent<F>) -> Self {
        self.scale(c)
    }
}

impl<F: Scalar> fmt::Debug for Vector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

/// Square `n × n` matrix with Laurent entries, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<F> {
    n: usize,
    entries: Vec<Laurent<F>>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            entries: vec![Laurent::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Laurent::one());
        }
        m
    }

    /// Matrix with constant entries.
    pub fn from_scalars(rows: &[Vec<F>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, c) in row.iter().enumerate() {
                m.set(i, j, Laurent::constant(c.clone()));
            }
        }
        m
    }

    pub fn from_columns(columns: &[Vector<F>]) -> Self {
        let n = columns.len();
        let mut m = Self::zeros(n);
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.dim(), n);
            for i in 0..n {
                m.set(i, j, col.get(i).clone());
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Laurent<F> {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Laurent<F>) {
        self.entries[i * self.n + j] = value;
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut Laurent<F> {
        &mut self.entries[i * self.n + j]
    }

    pub fn column(&self, j: usize) -> Vector<F> {
        Vector::from_entries((0..self.n).map(|i| self.get(i, j).clone()).collect())
    }

    /// Iterate over `(row, col, entry)` for nonzero entries.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &Laurent<F>)> {
        let n = self.n;
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(move |(k, e)| (k / n, k % n, e))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn mul_vec(&self, v: &Vector<F>) -> Vector<F> {
        assert_eq!(self.n, v.dim());
        let mut out = Vector::zeros(self.n);
        for (i, j, a) in self.nonzero_entries() {
            let b = v.get(j);
            if !b.is_zero() {
                let mut acc = out.get(i).clone();
                acc.add_assign_ref(&a.mul_ref(b));
                out.set(i, acc);
            }
        }
        out
    }

    pub fn scale(&self, c: &Laurent<F>) -> Self {
        self.map(|e| e.mul_ref(c))
    }

    pub fn scale_scalar(&self, c: &F) -> Self {
        self.map(|e| e.scale(c))
    }

    pub fn map(&self, f: impl Fn(&Laurent<F>) -> Laurent<F>) -> Self {
        Matrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&Laurent<F>) -> Result<Laurent<F>>) -> Result<Self> {
        Ok(Matrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect::<Result<_>>()?,
        })
    }

    pub fn pi_plus(&self) -> Self {
        self.map(Laurent::pi_plus)
    }

    pub fn hbar_specialize(&self, value: &F) -> Result<Self> {
        self.try_map(|e| e.hbar_specialize(value))
    }

    pub fn is_hbar_free(&self) -> bool {
        self.entries.iter().all(Laurent::is_hbar_free)
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for (i, j, e) in self.nonzero_entries() {
            m.set(j, i, e.clone());
        }
        m
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        let mut c = self.mul_ref(other);
        c.sub_assign_ref(&other.mul_ref(self));
        c
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.n);
        for _ in 0..k {
            acc = acc.mul_ref(self);
        }
        acc
    }

    /// Inverse over the Laurent ring, using unit (monomial, λ-free) pivots.
    pub fn try_inverse(&self) -> Result<Self> {
        let n = self.n;
        if self.is_identity() {
            return Ok(self.clone());
        }
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .find(|&r| unit_inverse(a.get(r, col)).is_some())
                .ok_or(Error::NonInvertibleConstantTerm)?;
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let p_inv = unit_inverse(a.get(col, col)).expect("pivot is a unit");
            a.scale_row(col, &p_inv);
            inv.scale_row(col, &p_inv);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                a.axpy_row(r, col, &factor);
                inv.axpy_row(r, col, &factor);
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        for j in 0..self.n {
            self.entries.swap(r1 * self.n + j, r2 * self.n + j);
        }
    }

    fn scale_row(&mut self, r: usize, c: &Laurent<F>) {
        for j in 0..self.n {
            let v = self.get(r, j).mul_ref(c);
            self.set(r, j, v);
        }
    }

    /// row[target] -= factor · row[source]
    fn axpy_row(&mut self, target: usize, source: usize, factor: &Laurent<F>) {
        for j in 0..self.n {
            let s = self.get(source, j);
            if s.is_zero() {
                continue;
            }
            let d = factor.mul_ref(s);
            self.entry_mut(target, j).sub_assign_ref(&d);
        }
    }
}

/// Inverse of `c·ħ^k` (the units of the coefficient ring).
fn unit_inverse<F: Scalar>(x: &Laurent<F>) -> Option<Laurent<F>> {
    let mut terms = x.terms();
    let ((h, l), c) = terms.next()?;
    if terms.next().is_some() || l != 0 {
        return None;
    }
    Some(Laurent::monomial(F::one() / c.clone(), -h, 0))
}

impl<F: Scalar> Coeff for Matrix<F> {
    fn is_zero(&self) -> bool {
        self.entries.iter().all(Laurent::is_zero)
    }

    fn add_assign_ref(&mut self, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            a.add_assign_ref(b);
        }
    }

    fn sub_assign_ref(&mut self, other: &Self) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            a.sub_assign_ref(b);
        }
    }

    fn negate(&self) -> Self {
        self.map(Laurent::negate)
    }
}

impl<F: Scalar> CoeffMul for Matrix<F> {
    fn mul_ref(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a.mul_ref(b);
                    out.entry_mut(i, j).add_assign_ref(&prod);
                }
            }
        }
        out
    }
}

impl<F: Scalar> Module for Matrix<F> {
    type Field = F;

    fn scale_by(&self, c: &Laurent<F>) -> Self {
        self.scale(c)
    }
}

impl<F: Scalar> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[Laurent<F>]> = self.entries.chunks(self.n.max(1)).collect();
        f.debug_list().entries(rows).finish()
    }
}

impl<F: ExactScalar> fmt::Display for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
