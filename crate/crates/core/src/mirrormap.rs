//! Flat coordinates, quantum-product tables in flat coordinates, and
//! Gromov–Witten extraction for rank-one hypersurfaces.

use crate::algebra::CoeffMul;
use crate::bigrecon::{looped_variables, BigConnection, ReconMode, TPolySeries};
use crate::error::{Error, Result};
use crate::geometry::GeometryInput;
use crate::laurent::Laurent;
use crate::matrix::Matrix;
use crate::novikov::{NovikovExponent, NovikovSeries, ScalarSeries, Truncation};
use crate::scalar::Scalar;

/// `t̂^k = t^k + g^k(Q)` with `g^k(0) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MirrorMap<F: Scalar> {
    pub g: Vec<ScalarSeries<F>>,
}

/// Solve `Σ_k (Q^a∂_a g^k) e_k = (𝔸_a(Q) − M_a) e_0` for every `a`.
pub fn mirror_map<F: Scalar>(canonical: &[NovikovSeries<Matrix<F>>]) -> Result<MirrorMap<F>> {
    let trunc = canonical[0].truncation().clone();
    let n = canonical[0].constant_term().map_or(0, Matrix::dim);
    let mut g = vec![ScalarSeries::zero(trunc.clone()); n];
    for d in trunc.exponents().into_iter().filter(|d| !d.is_zero()) {
        for k in 0..n {
            let mut value: Option<Laurent<F>> = None;
            for (a, am) in canonical.iter().enumerate() {
                let rhs = am.get(&d).map_or_else(Laurent::zero, |m| m.get(k, 0).clone());
                if d.0[a] == 0 {
                    if !rhs.is_zero() {
                        return Err(Error::InconsistentMixedPartials(d.0.clone()));
                    }
                    continue;
                }
                let candidate = rhs.scale(&F::ratio(1, d.0[a] as i64));
                match &value {
                    Some(v) if *v != candidate => return Err(Error::InconsistentMixedPartials(d.0.clone())),
                    Some(_) => {}
                    None => value = Some(candidate),
                }
            }
            if let Some(v) = value {
                g[k].add_term(d.clone(), v);
            }
        }
    }
    Ok(MirrorMap { g })
}

/// Multiplication by each basis element in flat coordinates: polynomials in
/// the non-divisor `t̂^k` (the `variables`), with coefficients series in
/// `q^a = Q^a e^{t̂^{p_a}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumProductTable<F: Scalar> {
    pub structure: Vec<TPolySeries<Matrix<F>>>,
    pub variables: Vec<usize>,
}

/// `Q'(q)` solving `q^a = Q'^a exp(g^{p_a}(Q'))`, by fixed-point iteration.
pub fn invert_divisor_map<F: Scalar>(
    map: &MirrorMap<F>,
    divisors: &[usize],
    trunc: &Truncation,
) -> Result<Vec<ScalarSeries<F>>> {
    let q: Vec<ScalarSeries<F>> =
        (0..trunc.rank()).map(|a| ScalarSeries::monomial(trunc.clone(), NovikovExponent::unit(trunc.rank(), a))).collect();
    let mut cur = q.clone();
    loop {
        let next: Vec<ScalarSeries<F>> = divisors
            .iter()
            .zip(&q)
            .map(|(&i, qa)| Ok(qa.mul(&map.g[i].compose(&cur).negate().exp()?)))
            .collect::<Result<_>>()?;
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

fn divisor_indices<F: Scalar>(geom: &GeometryInput<F>) -> Result<Vec<usize>> {
    let pres = geom.presentation()?;
    (0..pres.rank()).map(|a| pres.divisor_index(a).ok_or(Error::StringDivisorUnavailable)).collect()
}

/// Structure matrices in flat coordinates, via
/// `Ω_k̂(q, t̂) = Ω_k(Q'(q), t = t̂ − g(Q'(q)))` on the slice
/// `t^0 = t^{p_a} = 0`.
pub fn flat_products<F: Scalar>(
    big: &BigConnection<F>,
    geom: &GeometryInput<F>,
    map: &MirrorMap<F>,
) -> Result<QuantumProductTable<F>> {
    let pres = geom.presentation()?;
    let n = pres.dim();
    let vars = looped_variables(pres, ReconMode::Reduced)?;
    let div = divisor_indices(geom)?;
    let omega: Vec<_> = big.big_omega.iter().map(|o| o.restrict(&vars)).collect();
    let big_a: Vec<_> = big.big_a.iter().map(|o| o.restrict(&vars)).collect();
    let trunc = big.truncation().clone();
    let nt = big.t_order();
    let nvars = omega[0].nvars();

    // divisor axiom in the flat frame: 𝔸_a − Σ_k (Q^a∂_a g^k) Ω_k = Ω_{p_a}
    for (a, am) in big_a.iter().enumerate() {
        let mut hat = am.clone();
        for (k, om) in omega.iter().enumerate() {
            let dg = map.g[k].q_derivative(a);
            if !dg.is_zero() {
                hat = hat.sub(&om.map(|s| s.mul_scalar_series(&dg)));
            }
        }
        if hat != omega[div[a]] {
            return Err(Error::InternalFlatnessViolation(format!(
                "Q^{a}-direction operator in flat coordinates differs from the product by p_{a}"
            )));
        }
    }

    let q_prime = invert_divisor_map(map, &div, &trunc)?;
    // t^j = t̂^j − g^j(Q'(q)) as scalar polynomials
    let shifted: Vec<Option<TPolySeries<Laurent<F>>>> = (0..n)
        .map(|j| {
            vars.contains(&j).then(|| {
                let mut u = TPolySeries::constant(nvars, nt, map.g[j].compose(&q_prime).negate());
                let mut alpha = vec![0; nvars];
                alpha[j] = 1;
                u.add_term(alpha, ScalarSeries::constant(trunc.clone(), Laurent::one()));
                u
            })
        })
        .collect();
    let one = TPolySeries::constant(nvars, nt, ScalarSeries::constant(trunc.clone(), Laurent::one()));
    let mut powers: Vec<Vec<TPolySeries<Laurent<F>>>> = vec![vec![one.clone()]; n];

    let mut structure = Vec::with_capacity(n);
    for om in &omega {
        let mut out = TPolySeries::zero(nvars, nt, trunc.clone());
        for (alpha, s) in om.iter() {
            let mut factor = one.clone();
            for (j, &e) in alpha.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let u = shifted[j].as_ref().expect("slice keeps only looped variables");
                while powers[j].len() <= e as usize {
                    let next = powers[j].last().unwrap().mul(u);
                    powers[j].push(next);
                }
                factor = factor.mul(&powers[j][e as usize]);
            }
            let coeff = TPolySeries::constant(nvars, nt, s.compose(&q_prime));
            out = out.add(&factor.mul_with(&coeff, |c, m| m.scale(c)));
        }
        structure.push(out);
    }
    let table = QuantumProductTable { structure, variables: vars };
    table.check_unit_and_commutativity()?;
    Ok(table)
}

impl<F: Scalar> QuantumProductTable<F> {
    pub fn dim(&self) -> usize {
        self.structure.len()
    }

    pub fn check_unit_and_commutativity(&self) -> Result<()> {
        let n = self.dim();
        let proto = &self.structure[0];
        if *proto != TPolySeries::identity(proto.nvars(), proto.t_order(), proto.truncation().clone(), n) {
            return Err(Error::InternalFlatnessViolation("product by e_0 is not the identity".into()));
        }
        for (k, s) in self.structure.iter().enumerate() {
            for (alpha, series) in s.iter() {
                for (d, m) in series.iter() {
                    let unit = alpha.iter().all(|&e| e == 0) && d.is_zero();
                    for i in 0..n {
                        let want = if unit && i == k { Laurent::one() } else { Laurent::zero() };
                        if *m.get(i, 0) != want {
                            return Err(Error::InternalFlatnessViolation(format!("e_{k} * e_0 differs from e_{k}")));
                        }
                    }
                }
            }
            for (l, o) in self.structure.iter().enumerate().skip(k + 1) {
                if s.mul(o) != o.mul(s) {
                    return Err(Error::InternalFlatnessViolation(format!("products by e_{k} and e_{l} do not commute")));
                }
            }
        }
        Ok(())
    }

    /// Substitute `t̂ ↦ t̂ + c` (entries of `c` outside the variables ignored).
    pub fn shift(&self, c: &[F]) -> Self {
        let proto = &self.structure[0];
        let (nvars, nt, trunc) = (proto.nvars(), proto.t_order(), proto.truncation().clone());
        let structure = self
            .structure
            .iter()
            .map(|s| {
                let mut out = TPolySeries::zero(nvars, nt, trunc.clone());
                for (alpha, series) in s.iter() {
                    // ∏_j (t̂^j + c_j)^{α_j}, expanded binomially
                    let mut acc: Vec<(Vec<u32>, F)> = vec![(vec![0; nvars], F::one())];
                    for (j, &e) in alpha.iter().enumerate() {
                        if e == 0 {
                            continue;
                        }
                        let mut next = Vec::new();
                        for (beta, coeff) in &acc {
                            let mut binom = F::one();
                            for i in 0..=e {
                                // choose i factors of t̂^j, the rest c_j
                                let mut gamma = beta.clone();
                                gamma[j] += i;
                                let mut w = coeff.clone() * binom.clone();
                                for _ in i..e {
                                    w = w * c[j].clone();
                                }
                                next.push((gamma, w));
                                binom = binom * F::ratio((e - i) as i64, i as i64 + 1);
                            }
                        }
                        acc = next;
                    }
                    for (gamma, w) in acc {
                        if !w.is_zero() {
                            out.add_term(gamma, series.map(|m| m.scale_scalar(&w)));
                        }
                    }
                }
                out
            })
            .collect();
        QuantumProductTable { structure, variables: self.variables.clone() }
    }
}

/// The B-model locus `t̂ = t̂(Q, 0)`: mirror-map values and the products
/// along it, in the original frame.
#[derive(Clone, Debug, PartialEq)]
pub struct Locus<F: Scalar> {
    pub coordinates: Vec<ScalarSeries<F>>,
    pub products: Vec<NovikovSeries<Matrix<F>>>,
}

pub fn mirror_locus<F: Scalar>(big: &BigConnection<F>, map: &MirrorMap<F>) -> Locus<F> {
    Locus { coordinates: map.g.clone(), products: big.big_omega.iter().map(TPolySeries::at_zero).collect() }
}

/// Three-point data of a Picard-rank-one hypersurface (or complete
/// intersection) at `λ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct GwReport<F: Scalar> {
    /// Degree of the Euler class `e(𝒱) = k·p`.
    pub k: F,
    /// `⟨e_i, e_j⟩_𝒱 = ∫ e_i e_j e(𝒱)`.
    pub twisted_pairing: Matrix<F>,
    /// `⟨e_i ∗ e_j, e_l⟩_𝒱`, indexed `[i][j][l]`.
    pub three_point: Vec<Vec<Vec<TPolySeries<Laurent<F>>>>>,
    /// `three_point / k`.
    pub divided_by_k: Vec<Vec<Vec<TPolySeries<Laurent<F>>>>>,
    /// `(∂/∂t̂^{p})³ F = ⟨p ∗ p, p⟩_𝒱`.
    pub potential_third_derivative: TPolySeries<Laurent<F>>,
}

pub fn gw_extract<F: Scalar>(table: &QuantumProductTable<F>, geom: &GeometryInput<F>) -> Result<GwReport<F>> {
    let pres = geom.presentation()?;
    if pres.rank() != 1 {
        return Err(Error::NotRankOne);
    }
    let pairing = pres.pairing().ok_or(Error::PairingMissing)?;
    let n = pres.dim();
    let mut euler = Matrix::identity(n);
    let mut k = F::one();
    for v in geom.bundle() {
        euler = euler.mul_ref(&pres.class_operator(v));
        k = k * F::from_int(v[0]);
    }
    if geom.bundle().is_empty() || k.is_zero() {
        return Err(Error::Validation("GW extraction needs a bundle with nonzero Euler class".into()));
    }
    let twisted = pairing.mul_ref(&euler);
    let inv_k = Laurent::constant(F::one() / k.clone());
    let mut three_point = vec![vec![Vec::with_capacity(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let s = &table.structure[i];
                let mut acc = TPolySeries::zero(s.nvars(), s.t_order(), s.truncation().clone());
                for m in 0..n {
                    let g = twisted.get(m, l);
                    if !g.is_zero() {
                        acc = acc.add(&s.entry(m, j).scale_by(g));
                    }
                }
                three_point[i][j].push(acc);
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                let x = &three_point[i][j][l];
                if x != &three_point[j][i][l] || x != &three_point[i][l][j] {
                    return Err(Error::InternalFlatnessViolation(format!(
                        "three-point function ({i},{j},{l}) is not symmetric"
                    )));
                }
            }
        }
    }
    let divided_by_k = three_point
        .iter()
        .map(|a| a.iter().map(|b| b.iter().map(|x| x.scale_by(&inv_k)).collect()).collect())
        .collect();
    let p = pres.divisor_index(0).ok_or(Error::StringDivisorUnavailable)?;
    let potential_third_derivative = three_point[p][p][p].clone();
    Ok(GwReport { k, twisted_pairing: twisted, three_point, divided_by_k, potential_third_derivative })
}
