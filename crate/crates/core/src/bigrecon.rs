//! Reconstruction of the big quantum D-module from the canonical small
//! connection.
//!
//! Induction on t-degree: from `𝔸^{≤n}` build the multiplication operators
//! `Ω_k^{≤n}` of the algebra generated by the unit, then integrate
//! `Q^a∂_a Ω_k = ∂_k 𝔸_a` in t by Euler's formula to get `𝔸^{(n+1)}`.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use crate::algebra::{Coeff, CoeffMul, Module};
use crate::error::{Error, Result};
use crate::geometry::CohPresentation;
use crate::laurent::Laurent;
use crate::matrix::{Matrix, Vector};
use crate::mirrormap::MirrorMap;
use crate::novikov::{NovikovExponent, NovikovSeries, Truncation};
use crate::scalar::Scalar;

/// Polynomial in `t^0 … t^{n−1}` of bounded total degree with Novikov-series
/// coefficients. Monomials are exponent vectors of length `n`.
#[derive(Clone, PartialEq)]
pub struct TPolySeries<T> {
    nvars: usize,
    order: u32,
    trunc: Truncation,
    terms: BTreeMap<Vec<u32>, NovikovSeries<T>>,
}

fn degree(alpha: &[u32]) -> u32 {
    alpha.iter().sum()
}

impl<T: Coeff> TPolySeries<T> {
    pub fn zero(nvars: usize, order: u32, trunc: Truncation) -> Self {
        TPolySeries { nvars, order, trunc, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, order: u32, s: NovikovSeries<T>) -> Self {
        let mut out = Self::zero(nvars, order, s.truncation().clone());
        out.add_term(vec![0; nvars], s);
        out
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn t_order(&self) -> u32 {
        self.order
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &NovikovSeries<T>)> {
        self.terms.iter()
    }

    pub fn get(&self, alpha: &[u32]) -> Option<&NovikovSeries<T>> {
        self.terms.get(alpha)
    }

    /// Value at `t = 0`.
    pub fn at_zero(&self) -> NovikovSeries<T> {
        self.get(&vec![0; self.nvars]).cloned().unwrap_or_else(|| NovikovSeries::zero(self.trunc.clone()))
    }

    /// Highest total degree carrying a nonzero term.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|a| degree(a)).max()
    }

    /// Adds `t^alpha · s`; terms beyond the t-order are dropped.
    pub fn add_term(&mut self, alpha: Vec<u32>, s: NovikovSeries<T>) {
        debug_assert_eq!(alpha.len(), self.nvars);
        if degree(&alpha) > self.order || s.is_zero() {
            return;
        }
        match self.terms.get_mut(&alpha) {
            Some(cur) => {
                cur.add_assign_ref(&s);
                if cur.is_zero() {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                self.terms.insert(alpha, s);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, s) in &other.terms {
            out.add_term(a.clone(), s.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (a, s) in &other.terms {
            out.add_term(a.clone(), s.negate());
        }
        out
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&NovikovSeries<T>) -> NovikovSeries<U>) -> TPolySeries<U> {
        let mut out = TPolySeries::zero(self.nvars, self.order, self.trunc.clone());
        for (a, s) in &self.terms {
            out.add_term(a.clone(), f(s));
        }
        out
    }

    pub fn mul_with<U: Coeff, V: Coeff>(&self, other: &TPolySeries<U>, f: impl Fn(&T, &U) -> V) -> TPolySeries<V> {
        let mut out = TPolySeries::zero(self.nvars, self.order, self.trunc.clone());
        for (a, s) in &self.terms {
            let da = degree(a);
            for (b, u) in &other.terms {
                if da + degree(b) > self.order {
                    continue;
                }
                let alpha: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.add_term(alpha, s.mul_with(u, &f));
            }
        }
        out
    }

    /// Same polynomial, truncated to total degree `≤ order`.
    pub fn with_order(&self, order: u32) -> Self {
        let mut out = Self::zero(self.nvars, order, self.trunc.clone());
        for (a, s) in &self.terms {
            out.add_term(a.clone(), s.clone());
        }
        out
    }

    /// Homogeneous part of total degree `m`.
    pub fn homogeneous(&self, m: u32) -> Self {
        let mut out = Self::zero(self.nvars, self.order, self.trunc.clone());
        for (a, s) in self.terms.iter().filter(|(a, _)| degree(a) == m) {
            out.add_term(a.clone(), s.clone());
        }
        out
    }

    /// Drop every monomial involving a variable outside `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let mut out = Self::zero(self.nvars, self.order, self.trunc.clone());
        for (a, s) in &self.terms {
            if a.iter().enumerate().all(|(k, &e)| e == 0 || keep.contains(&k)) {
                out.add_term(a.clone(), s.clone());
            }
        }
        out
    }

    /// Multiply by `t^k`.
    pub fn mul_var(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.order, self.trunc.clone());
        for (a, s) in &self.terms {
            let mut b = a.clone();
            b[k] += 1;
            out.add_term(b, s.clone());
        }
        out
    }
}

impl<T: Module> TPolySeries<T> {
    pub fn scale_by(&self, c: &Laurent<T::Field>) -> Self {
        self.map(|s| s.scale_by(c))
    }

    /// `∂/∂t^k`; the result keeps the t-order but is exact only below it.
    pub fn derivative(&self, k: usize) -> Self {
        let mut out = Self::zero(self.nvars, self.order, self.trunc.clone());
        for (a, s) in &self.terms {
            if a[k] == 0 {
                continue;
            }
            let mut b = a.clone();
            b[k] -= 1;
            out.add_term(b, s.scale_by(&Laurent::from_int(a[k] as i64)));
        }
        out
    }

    /// `Q^a ∂/∂Q^a`.
    pub fn q_derivative(&self, a: usize) -> Self {
        self.map(|s| s.q_derivative(a))
    }
}

impl<T: CoeffMul> TPolySeries<T> {
    pub fn mul(&self, other: &Self) -> Self {
        self.mul_with(other, |x, y| x.mul_ref(y))
    }
}

impl<F: Scalar> TPolySeries<Matrix<F>> {
    pub fn identity(nvars: usize, order: u32, trunc: Truncation, n: usize) -> Self {
        Self::constant(nvars, order, NovikovSeries::constant(trunc, Matrix::identity(n)))
    }

    /// Entry `(i, j)` as a scalar polynomial.
    pub fn entry(&self, i: usize, j: usize) -> TPolySeries<Laurent<F>> {
        self.map(|s| s.map(|m| m.get(i, j).clone()))
    }

    /// Inverse, given an invertible value at `t = 0`:
    /// `V^{-1} = V_0^{-1} Σ_k (−(V − V_0) V_0^{-1})^k`.
    pub fn invert(&self) -> Result<Self> {
        let v0 = self.at_zero();
        let v0_inv = TPolySeries::constant(self.nvars, self.order, v0.invert()?);
        let n = v0.constant_term().map_or(0, Matrix::dim);
        let mut rest = self.clone();
        rest.terms.remove(&vec![0; self.nvars]);
        let step = rest.mul(&v0_inv).map(|s| s.negate());
        let mut term = Self::identity(self.nvars, self.order, self.trunc.clone(), n);
        let mut sum = term.clone();
        while !term.is_zero() {
            term = term.mul(&step);
            sum = sum.add(&term);
        }
        Ok(v0_inv.mul(&sum))
    }
}

impl<T: std::fmt::Debug> std::fmt::Debug for TPolySeries<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}

/// Which t-directions the induction integrates over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReconMode {
    /// Only `t^k` with `deg e_k ≥ 4`; the slice `t^0 = t^{divisors} = 0`.
    Reduced,
    /// Every `t^k`.
    Full,
}

impl FromStr for ReconMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reduced" => Ok(ReconMode::Reduced),
            "full" => Ok(ReconMode::Full),
            other => Err(Error::Config(format!("unknown reconstruction mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BigConnection<F: Scalar> {
    /// `𝔸_a(Q, t)`, one per Novikov variable.
    pub big_a: Vec<TPolySeries<Matrix<F>>>,
    /// `Ω_k(Q, t)`, one per basis element.
    pub big_omega: Vec<TPolySeries<Matrix<F>>>,
    pub mode: ReconMode,
    /// Indices `k` whose `t^k` is a variable of the polynomials.
    pub variables: Vec<usize>,
}

impl<F: Scalar> BigConnection<F> {
    pub fn t_order(&self) -> u32 {
        self.big_a[0].t_order()
    }

    pub fn truncation(&self) -> &Truncation {
        self.big_a[0].truncation()
    }

    /// Highest t-degree carrying a nonzero term anywhere.
    pub fn max_degree(&self) -> u32 {
        self.big_a.iter().chain(&self.big_omega).filter_map(TPolySeries::max_degree).max().unwrap_or(0)
    }
}

/// The t-variables looped over in the given mode.
pub fn looped_variables<F: Scalar>(pres: &CohPresentation<F>, mode: ReconMode) -> Result<Vec<usize>> {
    match mode {
        ReconMode::Full => Ok((0..pres.dim()).collect()),
        ReconMode::Reduced => {
            let low: Vec<usize> = (0..pres.dim()).filter(|&k| pres.degrees()[k] <= 2).collect();
            let mut expected: Vec<usize> = vec![0];
            for a in 0..pres.rank() {
                expected.push(pres.divisor_index(a).ok_or(Error::StringDivisorUnavailable)?);
            }
            expected.sort_unstable();
            if low != expected {
                return Err(Error::StringDivisorUnavailable);
            }
            Ok((0..pres.dim()).filter(|&k| pres.degrees()[k] >= 4).collect())
        }
    }
}

/// Grading bound on the t-order, `Σ_k max(0, deg e_k/2 − 1)` over looped `k`.
/// Callers cap it with the requested order.
pub fn default_t_order<F: Scalar>(pres: &CohPresentation<F>, mode: ReconMode) -> Result<u32> {
    let vars = looped_variables(pres, mode)?;
    let bound: i64 = vars.iter().map(|&k| (pres.degrees()[k] / 2 - 1).max(0)).sum();
    Ok(bound as u32)
}

/// `T_μ = ∏_a 𝔸_a^{μ(a)}` for every basis monomial, factors ascending in `a`.
fn monomial_operators<F: Scalar>(
    pres: &CohPresentation<F>,
    big_a: &[TPolySeries<Matrix<F>>],
    identity: &TPolySeries<Matrix<F>>,
) -> Vec<TPolySeries<Matrix<F>>> {
    let r = pres.rank();
    let mut cache: HashMap<Vec<u32>, TPolySeries<Matrix<F>>> = HashMap::new();
    cache.insert(vec![0; r], identity.clone());
    let mut out = Vec::with_capacity(pres.dim());
    for mu in pres.basis_monomials() {
        let mut cur = vec![0u32; r];
        for a in 0..r {
            for _ in 0..mu[a] {
                let mut next = cur.clone();
                next[a] += 1;
                if !cache.contains_key(&next) {
                    let value = cache[&cur].mul(&big_a[a]);
                    cache.insert(next.clone(), value);
                }
                cur = next;
            }
        }
        out.push(cache[mu].clone());
    }
    out
}

/// Matrix polynomial whose column `j` is column 0 of `ops[j]`.
fn unit_columns<F: Scalar>(ops: &[TPolySeries<Matrix<F>>]) -> TPolySeries<Matrix<F>> {
    let n = ops.len();
    let proto = &ops[0];
    let mut keys: BTreeMap<(Vec<u32>, NovikovExponent), ()> = BTreeMap::new();
    for op in ops {
        for (a, s) in op.iter() {
            for (d, _) in s.iter() {
                keys.insert((a.clone(), d.clone()), ());
            }
        }
    }
    let mut out = TPolySeries::zero(proto.nvars(), proto.t_order(), proto.truncation().clone());
    for (a, d) in keys.into_keys() {
        let cols: Vec<Vector<F>> = ops
            .iter()
            .map(|op| op.get(&a).and_then(|s| s.get(&d)).map_or_else(|| Vector::zeros(n), |m| m.column(0)))
            .collect();
        let mut s = NovikovSeries::zero(proto.truncation().clone());
        s.add_term(d, Matrix::from_columns(&cols));
        out.add_term(a, s);
    }
    out
}

/// `Ω_k = Σ_j B_{kj} T_j`, where `e_k = Σ_j B_{kj} T_j e_0`.
fn multiplication_operators<F: Scalar>(
    pres: &CohPresentation<F>,
    big_a: &[TPolySeries<Matrix<F>>],
    order: u32,
) -> Result<Vec<TPolySeries<Matrix<F>>>> {
    let n = pres.dim();
    let proto = &big_a[0];
    let identity = TPolySeries::identity(proto.nvars(), order, proto.truncation().clone(), n);
    let a: Vec<_> = big_a.iter().map(|x| x.with_order(order)).collect();
    let ops = monomial_operators(pres, &a, &identity);
    let v = unit_columns(&ops);
    let b = v.invert().map_err(|_| Error::GenerationFailure(order as usize))?;
    let mut omega = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = TPolySeries::zero(proto.nvars(), order, proto.truncation().clone());
        for (j, op) in ops.iter().enumerate() {
            let coeff = b.entry(j, k);
            if !coeff.is_zero() {
                acc = acc.add(&coeff.mul_with(op, |c, m| m.scale(c)));
            }
        }
        omega.push(acc);
    }
    Ok(omega)
}

/// Run the induction through t-degree `t_order`.
pub fn reconstruct_big<F: Scalar>(
    canonical: &[NovikovSeries<Matrix<F>>],
    pres: &CohPresentation<F>,
    t_order: u32,
    mode: ReconMode,
) -> Result<BigConnection<F>> {
    if canonical.len() != pres.rank() {
        return Err(Error::Config(format!(
            "expected {} canonical connection matrices, found {}",
            pres.rank(),
            canonical.len()
        )));
    }
    for (a, m) in canonical.iter().enumerate() {
        if m.iter().any(|(_, c)| !c.is_hbar_free()) {
            return Err(Error::Invariant(format!("canonical 𝔸_{a} depends on ħ")));
        }
        if m.constant_term() != Some(pres.cup(a)) {
            return Err(Error::Invariant(format!("canonical 𝔸_{a} at Q = 0 differs from the cup matrix")));
        }
    }
    let vars = looped_variables(pres, mode)?;
    let nvars = pres.dim();
    let mut big_a: Vec<TPolySeries<Matrix<F>>> =
        canonical.iter().map(|m| TPolySeries::constant(nvars, t_order, m.clone())).collect();
    let mut omega = Vec::new();
    for n in 0..=t_order {
        omega = multiplication_operators(pres, &big_a, n)?;
        for (x, &j) in vars.iter().enumerate() {
            for &k in &vars[x + 1..] {
                if omega[k].derivative(j) != omega[j].derivative(k) {
                    return Err(Error::ClosednessFailure { j, k, order: n as usize });
                }
            }
        }
        if n == t_order {
            break;
        }
        let inv = Laurent::constant(F::ratio(1, n as i64 + 1));
        for (a, big) in big_a.iter_mut().enumerate() {
            let mut step = TPolySeries::zero(nvars, t_order, big.truncation().clone());
            for &k in &vars {
                step = step.add(&omega[k].homogeneous(n).q_derivative(a).with_order(t_order).mul_var(k));
            }
            *big = big.add(&step.scale_by(&inv));
        }
    }
    let big_omega = omega.into_iter().map(|o| o.with_order(t_order)).collect();
    Ok(BigConnection { big_a, big_omega, mode, variables: vars })
}

/// Location of the first failing term of an identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub t: Vec<u32>,
    pub d: Vec<u32>,
    pub row: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: String,
    pub witness: Option<Witness>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatnessReport {
    pub checks: Vec<IdentityCheck>,
}

impl FlatnessReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(IdentityCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

fn witness<F: Scalar>(diff: &TPolySeries<Matrix<F>>) -> Option<Witness> {
    let (t, s) = diff.iter().next()?;
    let (d, m) = s.iter().next()?;
    let (row, col, _) = m.nonzero_entries().next()?;
    Some(Witness { t: t.clone(), d: d.0.clone(), row, col })
}

/// Unit, commutativity and integrability identities of a big connection.
pub fn flatness_check<F: Scalar>(big: &BigConnection<F>) -> FlatnessReport {
    let nt = big.t_order();
    let below = nt.saturating_sub(1);
    let mut checks = Vec::new();
    let mut push = |name: String, diff: TPolySeries<Matrix<F>>| checks.push(IdentityCheck { name, witness: witness(&diff) });

    for (k, om) in big.big_omega.iter().enumerate() {
        let n = big.big_omega.len();
        let col = om.map(|s| s.map(|m| {
            let mut only = Matrix::zeros(n);
            for i in 0..n {
                only.set(i, 0, m.get(i, 0).clone());
            }
            only
        }));
        let mut unit = Matrix::zeros(n);
        unit.set(k, 0, Laurent::one());
        let target = TPolySeries::constant(om.nvars(), nt, NovikovSeries::constant(om.truncation().clone(), unit));
        push(format!("Omega_{k} e_0 = e_{k}"), col.sub(&target));
    }
    let ops: Vec<(String, &TPolySeries<Matrix<F>>)> = big
        .big_a
        .iter()
        .enumerate()
        .map(|(a, m)| (format!("A_{a}"), m))
        .chain(big.big_omega.iter().enumerate().map(|(k, m)| (format!("Omega_{k}"), m)))
        .collect();
    for (x, (nx, mx)) in ops.iter().enumerate() {
        for (ny, my) in &ops[x + 1..] {
            push(format!("[{nx}, {ny}] = 0"), mx.mul(my).sub(&my.mul(mx)));
        }
    }
    for (x, &i) in big.variables.iter().enumerate() {
        for &j in &big.variables[x + 1..] {
            let diff = big.big_omega[j].derivative(i).sub(&big.big_omega[i].derivative(j)).with_order(below);
            push(format!("d_{i} Omega_{j} = d_{j} Omega_{i}"), diff);
        }
    }
    for (a, am) in big.big_a.iter().enumerate() {
        for &k in &big.variables {
            let diff = big.big_omega[k].q_derivative(a).sub(&am.derivative(k)).with_order(below);
            push(format!("Q^{a} d_Q Omega_{k} = d_{k} A_{a}"), diff);
        }
        for (b, bm) in big.big_a.iter().enumerate().skip(a + 1) {
            push(format!("Q^{b} d_Q A_{a} = Q^{a} d_Q A_{b}"), am.q_derivative(b).sub(&bm.q_derivative(a)));
        }
    }
    FlatnessReport { checks }
}

/// Restore the `t^0` and divisor directions of a reduced reconstruction:
/// `Ω_0 = id`, `Ω_{p_a} = 𝔸_a`, and `Q^d ↦ Q^d e^{⟨d, t⟩}`.
///
/// This is the string/divisor form of the reconstructed connection itself,
/// so it needs a vanishing mirror map; otherwise only the flat-coordinate
/// tables have that form.
pub fn expand_string_divisor<F: Scalar>(
    big: &BigConnection<F>,
    pres: &CohPresentation<F>,
    map: &MirrorMap<F>,
) -> Result<BigConnection<F>> {
    if big.mode != ReconMode::Reduced || map.g.iter().any(|g| !g.is_zero()) {
        return Err(Error::StringDivisorUnavailable);
    }
    let nt = big.t_order();
    let div: Vec<usize> = (0..pres.rank()).map(|a| pres.divisor_index(a).ok_or(Error::StringDivisorUnavailable)).collect::<Result<_>>()?;
    let expand = |p: &TPolySeries<Matrix<F>>| {
        let mut out = TPolySeries::zero(p.nvars(), nt, p.truncation().clone());
        for (alpha, s) in p.iter() {
            for (d, m) in s.iter() {
                // e^{Σ_a d_a t^{div_a}} truncated at total degree nt − |alpha|
                let mut acc: Vec<(Vec<u32>, F)> = vec![(alpha.clone(), F::one())];
                for (a, &i) in div.iter().enumerate() {
                    let mut next = Vec::new();
                    for (beta, c) in &acc {
                        let room = nt - degree(beta);
                        let mut coeff = c.clone();
                        for m_pow in 0..=room {
                            let mut gamma = beta.clone();
                            gamma[i] += m_pow;
                            next.push((gamma, coeff.clone()));
                            if d.0[a] == 0 {
                                break;
                            }
                            coeff = coeff * F::ratio(d.0[a] as i64, m_pow as i64 + 1);
                        }
                    }
                    acc = next;
                }
                for (gamma, c) in acc {
                    let mut term = NovikovSeries::zero(p.truncation().clone());
                    term.add_term(d.clone(), m.scale_scalar(&c));
                    out.add_term(gamma, term);
                }
            }
        }
        out
    };
    let big_a: Vec<_> = big.big_a.iter().map(expand).collect();
    let mut big_omega: Vec<_> = big.big_omega.iter().map(expand).collect();
    big_omega[0] = TPolySeries::identity(pres.dim(), nt, big.truncation().clone(), pres.dim());
    for (a, &i) in div.iter().enumerate() {
        big_omega[i] = big_a[a].clone();
    }
    Ok(BigConnection { big_a, big_omega, mode: ReconMode::Full, variables: (0..pres.dim()).collect() })
}
