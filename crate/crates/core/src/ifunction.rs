//! Hypergeometric I-function, its bundle modification, and the frame columns.
//!
//! The Q^d coefficient of the I-function is a product of commuting operators
//! applied to the unit `e_0`:
//!
//! * toric row `u` with `k = ⟨u, d⟩ ≥ 0`: `∏_{ν=1}^{k} (u + νħ)^{-1}`, each
//!   inverse expanded as `Σ_m (−u)^m (νħ)^{-m-1}` (finite, `u` is nilpotent);
//! * toric row with `k < 0`: `∏_{ν=k+1}^{0} (u + νħ)`, including the `ν = 0`
//!   factor `u` itself;
//! * bundle row `v` with `k = ⟨v, d⟩ ≥ 0`: `∏_{ν=1}^{k} (v + νħ + λ)`.

use std::collections::HashMap;

use crate::algebra::{Coeff, CoeffMul};
use crate::error::{Error, Result};
use crate::geometry::{CohPresentation, GeometryInput};
use crate::laurent::Laurent;
use crate::matrix::{Matrix, Vector};
use crate::novikov::{NovikovExponent, NovikovSeries, Truncation};
use crate::scalar::Scalar;

/// Series of cohomology-valued coefficients (I- and J-functions).
pub type CohVectorSeries<F> = NovikovSeries<Vector<F>>;

/// Whether the equivariant parameter λ is kept or set to zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LambdaMode {
    Zero,
    Poly,
}

impl std::str::FromStr for LambdaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(LambdaMode::Zero),
            "poly" => Ok(LambdaMode::Poly),
            other => Err(Error::Config(format!("unknown lambda mode {other:?}"))),
        }
    }
}

/// `w ↦ (u + s)·w` for a class operator `u` and a scalar shift `s`.
fn apply_linear<F: Scalar>(u: &Matrix<F>, shift: &Laurent<F>, w: &Vector<F>) -> Vector<F> {
    let mut out = u.mul_vec(w);
    out.add_assign_ref(&w.scale(shift));
    out
}

/// `w ↦ (u + νħ)^{-1}·w`, `ν ≠ 0`.
fn apply_inverse<F: Scalar>(u: &Matrix<F>, nu: i64, w: &Vector<F>) -> Vector<F> {
    let step = Laurent::monomial(F::ratio(1, nu), -1, 0);
    let mut term = w.scale(&step);
    let mut out = term.clone();
    for _ in 0..=u.dim() {
        term = u.mul_vec(&term).scale(&step).negate();
        if term.is_zero() {
            return out;
        }
        out.add_assign_ref(&term);
    }
    unreachable!("cup operator is nilpotent, so the expansion terminates")
}

fn toric_factor<F: Scalar>(u: &Matrix<F>, k: i64, w: Vector<F>) -> Vector<F> {
    let mut w = w;
    if k >= 0 {
        for nu in 1..=k {
            w = apply_inverse(u, nu, &w);
        }
    } else {
        for nu in (k + 1)..=0 {
            w = apply_linear(u, &Laurent::monomial(F::from_int(nu), 1, 0), &w);
            if w.is_zero() {
                break;
            }
        }
    }
    w
}

fn bundle_factor<F: Scalar>(
    v: &Matrix<F>,
    k: i64,
    mode: LambdaMode,
    d: &NovikovExponent,
    w: Vector<F>,
) -> Result<Vector<F>> {
    if k < 0 {
        return Err(match mode {
            LambdaMode::Zero => Error::NonConvexAtLambdaZero(d.0.clone()),
            LambdaMode::Poly => Error::NegativeBundlePairing(d.0.clone()),
        });
    }
    let mut w = w;
    for nu in 1..=k {
        let mut shift = Laurent::monomial(F::from_int(nu), 1, 0);
        if mode == LambdaMode::Poly {
            shift.add_assign_ref(&Laurent::lambda());
        }
        w = apply_linear(v, &shift, &w);
    }
    Ok(w)
}

/// The I-function of `(X, 𝒱)` through the given truncation.
pub fn i_function<F: Scalar>(
    geom: &GeometryInput<F>,
    trunc: &Truncation,
    mode: LambdaMode,
) -> Result<CohVectorSeries<F>> {
    let pres = geom.presentation()?;
    if mode == LambdaMode::Zero && !geom.convex() {
        return Err(Error::NonConvexAtLambdaZero(vec![]));
    }
    check_rank(pres, trunc)?;
    let toric: Vec<Matrix<F>> = geom.weights().iter().map(|u| pres.class_operator(u)).collect();
    let bundle: Vec<Matrix<F>> = geom.bundle().iter().map(|v| pres.class_operator(v)).collect();
    let n = pres.dim();
    let mut out = NovikovSeries::zero(trunc.clone());
    for d in trunc.exponents() {
        let mut w = Vector::basis(n, 0);
        for (op, row) in toric.iter().zip(geom.weights()) {
            w = toric_factor(op, d.pair(row), w);
            if w.is_zero() {
                break;
            }
        }
        for (op, row) in bundle.iter().zip(geom.bundle()) {
            if w.is_zero() {
                break;
            }
            w = bundle_factor(op, d.pair(row), mode, &d, w)?;
        }
        out.add_term(d, w);
    }
    Ok(out)
}

/// Multiply the Q^d coefficient by the bundle factor for `d`.
pub fn hypergeometric_modification<F: Scalar>(
    series: &CohVectorSeries<F>,
    pres: &CohPresentation<F>,
    bundle_rows: &[Vec<i64>],
    mode: LambdaMode,
) -> Result<CohVectorSeries<F>> {
    let ops: Vec<Matrix<F>> = bundle_rows.iter().map(|v| pres.class_operator(v)).collect();
    let mut out = NovikovSeries::zero(series.truncation().clone());
    for (d, c) in series.iter() {
        let mut w = c.clone();
        for (op, row) in ops.iter().zip(bundle_rows) {
            w = bundle_factor(op, d.pair(row), mode, d, w)?;
        }
        out.add_term(d.clone(), w);
    }
    Ok(out)
}

fn check_rank<F: Scalar>(pres: &CohPresentation<F>, trunc: &Truncation) -> Result<()> {
    if trunc.rank() != pres.rank() {
        return Err(Error::Config(format!(
            "truncation has {} Novikov variables but the geometry has r = {}",
            trunc.rank(),
            pres.rank()
        )));
    }
    Ok(())
}

/// `ħQ^a∂/∂Q^a + p_a` acting on a vector series.
pub fn ladder<F: Scalar>(pres: &CohPresentation<F>, a: usize, s: &CohVectorSeries<F>) -> CohVectorSeries<F> {
    let m = pres.cup(a);
    s.map_with_exponent(|d, c| {
        let mut out = m.mul_vec(c);
        out.add_assign_ref(&c.scale(&Laurent::monomial(F::from_int(d.0[a] as i64), 1, 0)));
        out
    })
}

/// `ħQ^a∂/∂Q^a + p_a` acting on a matrix series from the left.
pub fn ladder_matrix<F: Scalar>(
    pres: &CohPresentation<F>,
    a: usize,
    s: &NovikovSeries<Matrix<F>>,
) -> NovikovSeries<Matrix<F>> {
    let m = pres.cup(a);
    s.map_with_exponent(|d, c| {
        let mut out = m.mul_ref(c);
        out.add_assign_ref(&c.scale(&Laurent::monomial(F::from_int(d.0[a] as i64), 1, 0)));
        out
    })
}

/// Frame matrix `S` whose column `k` is `∏_a (ħQ^a∂_a + p_a)^{μ_k(a)} I`.
///
/// For an I-function this is `L^{-1}` in the Floer frame.
pub fn frame_columns<F: Scalar>(pres: &CohPresentation<F>, i_series: &CohVectorSeries<F>) -> NovikovSeries<Matrix<F>> {
    let r = pres.rank();
    let mut cache: HashMap<Vec<u32>, CohVectorSeries<F>> = HashMap::new();
    cache.insert(vec![0; r], i_series.clone());
    let mut columns = Vec::with_capacity(pres.dim());
    for mu in pres.basis_monomials() {
        // climb from the unit, ascending in a
        let mut cur = vec![0u32; r];
        for a in 0..r {
            for _ in 0..mu[a] {
                let mut next = cur.clone();
                next[a] += 1;
                if !cache.contains_key(&next) {
                    let value = ladder(pres, a, &cache[&cur]);
                    cache.insert(next.clone(), value);
                }
                cur = next;
            }
        }
        columns.push(cache[mu].clone());
    }
    assemble_columns(i_series.truncation(), &columns)
}

/// Matrix series with the given vector series as columns.
pub fn assemble_columns<F: Scalar>(trunc: &Truncation, columns: &[CohVectorSeries<F>]) -> NovikovSeries<Matrix<F>> {
    let n = columns.len();
    let mut out = NovikovSeries::zero(trunc.clone());
    for d in trunc.exponents() {
        let cols: Vec<Vector<F>> = columns
            .iter()
            .map(|c| c.get(&d).cloned().unwrap_or_else(|| Vector::zeros(n)))
            .collect();
        out.add_term(d, Matrix::from_columns(&cols));
    }
    out
}

/// Column `k` of a matrix series.
pub fn column<F: Scalar>(s: &NovikovSeries<Matrix<F>>, k: usize) -> CohVectorSeries<F> {
    s.map(|m| m.column(k))
}

/// First term violating homogeneity: with `deg ħ = deg λ = 2`,
/// `deg e_i = degrees[i]`, `deg Q^a = 2·(Σu − Σv)_a`, every term must have
/// degree zero. Returns `(d, i, h, lam)` of the first offender.
pub fn homogeneity_defect<F: Scalar>(
    geom: &GeometryInput<F>,
    series: &CohVectorSeries<F>,
) -> Result<Option<(NovikovExponent, usize, i32, u32)>> {
    let pres = geom.presentation()?;
    let q_deg = geom.first_chern_minus_bundle();
    for (d, v) in series.iter() {
        let dq = 2 * d.pair(&q_deg);
        for (i, e) in v.entries().iter().enumerate() {
            for ((h, l), _) in e.terms() {
                if dq + 2 * h as i64 + 2 * l as i64 + pres.degrees()[i] != 0 {
                    return Ok(Some((d.clone(), i, h, l)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::projective_space;
    use crate::scalar::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn unit_at_degree_zero() {
        let g = projective_space::<Rational>(3, &[2]);
        let i = i_function(&g, &Truncation::uniform(1, 2), LambdaMode::Zero).unwrap();
        assert_eq!(i.constant_term().unwrap(), &Vector::basis(4, 0));
    }

    #[test]
    fn p2_degree_one_coefficient() {
        // (p + ħ)^{-3} with p^3 = 0: ħ^{-3} − 3ħ^{-4} p + 6ħ^{-5} p^2
        let g = projective_space::<Rational>(2, &[]);
        let i = i_function(&g, &Truncation::uniform(1, 1), LambdaMode::Zero).unwrap();
        let c = i.get(&NovikovExponent(vec![1])).unwrap();
        assert_eq!(c.get(0), &Laurent::monomial(q(1), -3, 0));
        assert_eq!(c.get(1), &Laurent::monomial(q(-3), -4, 0));
        assert_eq!(c.get(2), &Laurent::monomial(q(6), -5, 0));
    }

    #[test]
    fn p1_with_o1_keeps_lambda() {
        let g = projective_space::<Rational>(1, &[1]);
        let base = i_function(&g.untwisted(), &Truncation::uniform(1, 1), LambdaMode::Poly).unwrap();
        let modified = hypergeometric_modification(&base, g.presentation().unwrap(), g.bundle(), LambdaMode::Poly).unwrap();
        let direct = i_function(&g, &Truncation::uniform(1, 1), LambdaMode::Poly).unwrap();
        assert_eq!(modified, direct);
        // the d=1 factor is (p + ħ + λ): on e_0 gives (ħ + λ) e_0 + e_1,
        // then (p + ħ)^{-2} = ħ^{-2} − 2pħ^{-3}
        let c = direct.get(&NovikovExponent(vec![1])).unwrap();
        let e0 = Laurent::from_terms([((-1, 0), q(1)), ((-2, 1), q(1))]);
        let e1 = Laurent::from_terms([((-2, 0), q(1)), ((-2, 0), q(-2)), ((-3, 1), q(-2))]);
        assert_eq!(c.get(0), &e0);
        assert_eq!(c.get(1), &e1);
    }

    #[test]
    fn empty_bundle_modification_is_identity() {
        let g = projective_space::<Rational>(3, &[]);
        let i = i_function(&g, &Truncation::uniform(1, 3), LambdaMode::Zero).unwrap();
        assert_eq!(hypergeometric_modification(&i, g.presentation().unwrap(), &[], LambdaMode::Zero).unwrap(), i);
    }

    #[test]
    fn negative_bundle_pairing_is_rejected() {
        let p = crate::geometry::CohPresentation::<Rational>::projective(2);
        let g = GeometryInput::new("neg", vec![vec![1]; 3], vec![vec![-1]], false, p).unwrap();
        let t = Truncation::uniform(1, 1);
        assert!(matches!(i_function(&g, &t, LambdaMode::Zero), Err(Error::NonConvexAtLambdaZero(_))));
        assert!(matches!(i_function(&g, &t, LambdaMode::Poly), Err(Error::NegativeBundlePairing(_))));
    }

    #[test]
    fn frame_starts_at_identity_and_column_zero_is_i() {
        let g = projective_space::<Rational>(4, &[5]);
        let pres = g.presentation().unwrap();
        let i = i_function(&g, &Truncation::uniform(1, 2), LambdaMode::Zero).unwrap();
        let s = frame_columns(pres, &i);
        assert!(s.constant_term().unwrap().is_identity());
        assert_eq!(column(&s, 0), i);
        assert_eq!(homogeneity_defect(&g, &i).unwrap(), None);
    }

    #[test]
    fn floats_instantiate() {
        let g = projective_space::<f64>(2, &[]);
        let i = i_function(&g, &Truncation::uniform(1, 2), LambdaMode::Zero).unwrap();
        // Q^2 coefficient at p = 0 is 1/(2!)^3 ħ^{-6}
        let c = i.get(&NovikovExponent(vec![2])).unwrap().get(0).coeff(-6, 0);
        assert!((c - 1.0 / 8.0).abs() < 1e-12);
    }
}
