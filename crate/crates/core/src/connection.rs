//! Small quantum D-module connection, extracted from a frame `S = L^{-1}`,
//! and the Picard–Fuchs substitution oracle for rank-one hypersurfaces.

use crate::algebra::{Coeff, CoeffMul};
use crate::error::{Error, Result};
use crate::geometry::CohPresentation;
use crate::ifunction::ladder_matrix;
use crate::laurent::Laurent;
use crate::matrix::Matrix;
use crate::novikov::{NovikovExponent, NovikovSeries, ScalarSeries, Truncation};
use crate::scalar::Scalar;

/// Connection matrices `A_a(Q, ħ)` in the Floer frame.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallConnection<F: Scalar> {
    pub matrices: Vec<NovikovSeries<Matrix<F>>>,
}

impl<F: Scalar> SmallConnection<F> {
    pub fn rank(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, a: usize) -> &NovikovSeries<Matrix<F>> {
        &self.matrices[a]
    }

    pub fn truncation(&self) -> &Truncation {
        self.matrices[0].truncation()
    }
}

/// Solve `(ħQ^a∂_a + p_a) S = S A_a` for every `a`, degree by degree.
pub fn connection_from_frame<F: Scalar>(
    pres: &CohPresentation<F>,
    s: &NovikovSeries<Matrix<F>>,
) -> Result<SmallConnection<F>> {
    let n = pres.dim();
    match s.constant_term() {
        Some(c) if c.is_identity() => {}
        _ => return Err(Error::FrameNotUnital),
    }
    let trunc = s.truncation().clone();
    let exps = trunc.exponents();
    let mut matrices = Vec::with_capacity(pres.rank());
    for a in 0..pres.rank() {
        let rhs = ladder_matrix(pres, a, s);
        let mut out: NovikovSeries<Matrix<F>> = NovikovSeries::zero(trunc.clone());
        for d in &exps {
            // A_d = (ladder S)_d − Σ_{0<f≤d} S_f A_{d−f}
            let mut ad = rhs.get(d).cloned().unwrap_or_else(|| Matrix::zeros(n));
            for f in d.proper_divisors() {
                let (Some(sf), Some(rest)) = (s.get(&f), out.get(&d.checked_sub(&f).unwrap())) else {
                    continue;
                };
                ad.sub_assign_ref(&sf.mul_ref(rest));
            }
            check_pole_order(&ad, n)?;
            out.add_term(d.clone(), ad);
        }
        if s.mul(&out) != rhs {
            return Err(Error::Invariant(format!(
                "S·A_{a} disagrees with the derivative ladder of S"
            )));
        }
        matrices.push(out);
    }
    Ok(SmallConnection { matrices })
}

fn check_pole_order<F: Scalar>(m: &Matrix<F>, n: usize) -> Result<()> {
    for (_, _, e) in m.nonzero_entries() {
        if let Some(h) = e.min_hbar() {
            if (h as i64) < -(n as i64) {
                return Err(Error::Invariant(format!(
                    "connection entry has an ħ pole of order {} beyond the nilpotency bound {n}",
                    -h
                )));
            }
        }
    }
    Ok(())
}

/// First violation of `ħ(Q^b∂_b A_a − Q^a∂_a A_b) + [A_b, A_a] = 0`,
/// as `(a, b, d)`.
pub fn flatness_defect<F: Scalar>(matrices: &[NovikovSeries<Matrix<F>>]) -> Option<(usize, usize, NovikovExponent)> {
    let hbar = Laurent::hbar();
    for a in 0..matrices.len() {
        for b in (a + 1)..matrices.len() {
            let mut lhs = matrices[a].q_derivative(b).sub(&matrices[b].q_derivative(a)).map(|m| m.scale(&hbar));
            lhs = lhs.add(&matrices[b].mul(&matrices[a]));
            lhs = lhs.sub(&matrices[a].mul(&matrices[b]));
            let first = lhs.iter().next().map(|(d, _)| d.clone());
            if let Some(d) = first {
                return Some((a, b, d));
            }
        }
    }
    None
}

/// Last column `C_0 … C_{N−1}` of the connection for `ℙ^{N−1}` twisted by
/// `𝒪(k)`, from `P^N Δ = Q ∏_{m=1}^{k} (kP + mħ) Δ` with `[P, Q] = ħQ`.
///
/// Elements are kept in normal order `Σ_j c_j(Q, ħ) P^j Δ`; the highest
/// power `P^j`, `j ≥ N`, is rewritten as `Q (P + ħ)^{j−N} ∏(kP + mħ) Δ`.
pub fn pf_reduce<F: Scalar>(n: usize, k: u32, order: u32) -> Result<Vec<ScalarSeries<F>>> {
    if n == 0 {
        return Err(Error::Config("pf_reduce needs N ≥ 1".into()));
    }
    let trunc = Truncation::uniform(1, order);
    // ∏_{m=1}^{k} (kP + mħ) as a polynomial in P with ħ-coefficients
    let mut rel: Vec<Laurent<F>> = vec![Laurent::one()];
    for m in 1..=k {
        rel = poly_mul(&rel, &[Laurent::monomial(F::from_int(m as i64), 1, 0), Laurent::constant(F::from_int(k as i64))]);
    }
    let shift = [Laurent::hbar(), Laurent::one()]; // P + ħ
    let q = ScalarSeries::monomial(trunc.clone(), NovikovExponent(vec![1]));

    let mut poly: Vec<ScalarSeries<F>> = vec![NovikovSeries::zero(trunc.clone()); n + 1];
    poly[n] = NovikovSeries::constant(trunc.clone(), Laurent::one());
    while let Some(j) = (n..poly.len()).rev().find(|&j| !poly[j].is_zero()) {
        let c = std::mem::replace(&mut poly[j], NovikovSeries::zero(trunc.clone()));
        let mut repl = rel.clone();
        for _ in 0..(j - n) {
            repl = poly_mul(&repl, &shift);
        }
        let cq = c.mul(&q);
        if cq.is_zero() {
            continue;
        }
        if poly.len() < repl.len() {
            poly.resize(repl.len(), NovikovSeries::zero(trunc.clone()));
        }
        for (i, r) in repl.iter().enumerate() {
            if !r.is_zero() {
                poly[i] = poly[i].add(&cq.mul_scalar_series(&NovikovSeries::constant(trunc.clone(), r.clone())));
            }
        }
    }
    poly.truncate(n);
    Ok(poly)
}

fn poly_mul<F: Scalar>(a: &[Laurent<F>], b: &[Laurent<F>]) -> Vec<Laurent<F>> {
    let mut out = vec![Laurent::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}
