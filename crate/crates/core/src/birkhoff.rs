//! Birkhoff factorization `L = L₊L₋` and the canonical (ħ-free) frame.

use crate::algebra::{Coeff, CoeffMul};
use crate::connection::SmallConnection;
use crate::error::{Error, Result};
use crate::ifunction::{column, CohVectorSeries};
use crate::laurent::Laurent;
use crate::matrix::Matrix;
use crate::novikov::NovikovSeries;
use crate::scalar::Scalar;

type MatrixSeries<F> = NovikovSeries<Matrix<F>>;

#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffFactors<F: Scalar> {
    /// `L₊`: ħ-nonnegative, identity at `Q = 0`.
    pub l_plus: MatrixSeries<F>,
    /// `L₋⁻¹ = L⁻¹·L₊`: identity plus strictly negative ħ powers.
    pub l_minus_inv: MatrixSeries<F>,
}

fn unital<F: Scalar>(s: &MatrixSeries<F>) -> Result<usize> {
    match s.constant_term() {
        Some(c) if c.is_identity() => Ok(c.dim()),
        _ => Err(Error::FrameNotUnital),
    }
}

/// `L₊,d = −Σ_{0<f≤d} π₊(T_f L₊,d−f)`, cross-checked against the Neumann sum.
pub fn birkhoff_factorize<F: Scalar>(linv: &MatrixSeries<F>) -> Result<BirkhoffFactors<F>> {
    let n = unital(linv)?;
    let trunc = linv.truncation().clone();
    let mut l_plus = NovikovSeries::constant(trunc.clone(), Matrix::identity(n));
    for d in trunc.exponents().into_iter().filter(|d| !d.is_zero()) {
        let mut acc = Matrix::zeros(n);
        for f in d.proper_divisors() {
            let rest = d.checked_sub(&f).unwrap();
            if let (Some(tf), Some(lp)) = (linv.get(&f), l_plus.get(&rest)) {
                acc.add_assign_ref(&tf.mul_ref(lp));
            }
        }
        l_plus.add_term(d, acc.pi_plus().negate());
    }
    let l_minus_inv = linv.mul(&l_plus);

    let factors = BirkhoffFactors { l_plus, l_minus_inv };
    factors.check()?;
    if neumann_l_plus(linv) != factors.l_plus {
        return Err(Error::Invariant("recursive and Neumann-sum L₊ disagree".into()));
    }
    Ok(factors)
}

/// `L₊ = Σ_k (id − π₊∘L⁻¹)^k` applied to the identity, summed until the
/// increments vanish through the truncation.
pub fn neumann_l_plus<F: Scalar>(linv: &MatrixSeries<F>) -> MatrixSeries<F> {
    let n = linv.constant_term().map_or(0, Matrix::dim);
    let mut term = NovikovSeries::constant(linv.truncation().clone(), Matrix::identity(n));
    let mut sum = term.clone();
    while !term.is_zero() {
        term = term.sub(&linv.mul(&term).map(Matrix::pi_plus));
        sum = sum.add(&term);
    }
    sum
}

impl<F: Scalar> BirkhoffFactors<F> {
    fn check(&self) -> Result<()> {
        for (d, m) in self.l_plus.iter() {
            if m.nonzero_entries().any(|(_, _, e)| e.min_hbar().is_some_and(|h| h < 0)) {
                return Err(Error::Invariant(format!("L₊ has a negative ħ power at Q^{d:?}")));
            }
        }
        for (d, m) in self.l_minus_inv.iter() {
            let plus = m.pi_plus();
            let ok = if d.is_zero() { plus.is_identity() } else { plus.is_zero() };
            if !ok {
                return Err(Error::Invariant(format!("π₊(L₋⁻¹) differs from the identity at Q^{d:?}")));
            }
        }
        Ok(())
    }
}

/// `𝔸_a = L₊⁻¹ A_a L₊ + ħ L₊⁻¹ Q^a∂_a L₊`, asserted ħ-free.
pub fn canonical_connection<F: Scalar>(
    conn: &SmallConnection<F>,
    factors: &BirkhoffFactors<F>,
) -> Result<Vec<MatrixSeries<F>>> {
    let lp = &factors.l_plus;
    let lp_inv = lp.invert()?;
    let hbar = Laurent::hbar();
    let mut out = Vec::with_capacity(conn.rank());
    for (a, am) in conn.matrices.iter().enumerate() {
        let gauge = lp_inv.mul(&am.mul(lp)).add(&lp_inv.mul(&lp.q_derivative(a).map(|m| m.scale(&hbar))));
        for (d, m) in gauge.iter() {
            for (row, col, e) in m.nonzero_entries() {
                if let Some(((h, _), _)) = e.terms().find(|((h, _), _)| *h != 0) {
                    return Err(Error::ResidualHbar { matrix: a, degree: d.0.clone(), row, col, hbar: h });
                }
            }
        }
        if am.iter().all(|(_, m)| m.nonzero_entries().all(|(_, _, e)| e.min_hbar().is_none_or(|h| h >= 0))) {
            let zero = F::zero();
            let lp0 = lp.try_map(|m| m.hbar_specialize(&zero))?;
            let a0 = am.try_map(|m| m.hbar_specialize(&zero))?;
            if lp0.invert()?.mul(&a0.mul(&lp0)) != gauge {
                return Err(Error::Invariant(format!("ħ = 0 shortcut disagrees with the full gauge for 𝔸_{a}")));
            }
        }
        out.push(gauge);
    }
    Ok(out)
}

/// `J = L₋⁻¹ e_0`.
pub fn canonical_j<F: Scalar>(factors: &BirkhoffFactors<F>) -> CohVectorSeries<F> {
    column(&factors.l_minus_inv, 0)
}
