//! Toric weight data, twisting bundles, and finite cohomology presentations.

use serde_json::{json, Value};

use crate::algebra::Coeff;
use crate::encoding::{array, int_from_json, scalar_from_json, scalar_to_json};
use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::matrix::{Matrix, Vector};
use crate::scalar::{ExactScalar, Scalar};

/// Finite presentation of `H*(X)` by monomial basis and cup-product matrices.
///
/// Basis element `e_i` is the monomial `p^{μ_i}`; `e_0` is the unit. Cup
/// product by `p_a` acts by `cup[a]` on column vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CohPresentation<F: Scalar> {
    basis_monomials: Vec<Vec<u32>>,
    degrees: Vec<i64>,
    cup: Vec<Matrix<F>>,
    pairing: Option<Matrix<F>>,
}

impl<F: Scalar> CohPresentation<F> {
    /// Build and validate.
    pub fn new(
        basis_monomials: Vec<Vec<u32>>,
        degrees: Vec<i64>,
        cup: Vec<Matrix<F>>,
        pairing: Option<Matrix<F>>,
    ) -> Result<Self> {
        let p = CohPresentation {
            basis_monomials,
            degrees,
            cup,
            pairing,
        };
        p.validate()?;
        Ok(p)
    }

    /// `ℚ[p]/(p^{n+1})` with basis `1, p, …, p^n` and pairing `δ_{i+j,n}`.
    pub fn projective(n_dim: usize) -> Self {
        Self::product(&[n_dim])
    }

    /// `⊗_a ℚ[p_a]/(p_a^{n_a+1})`, basis ordered by total degree and then
    /// lexicographically descending in the exponent of `p_1`.
    pub fn product(dims: &[usize]) -> Self {
        let r = dims.len();
        let mut monomials: Vec<Vec<u32>> = vec![vec![]];
        for &n in dims {
            monomials = monomials
                .into_iter()
                .flat_map(|m| {
                    (0..=n as u32).map(move |k| {
                        let mut m = m.clone();
                        m.push(k);
                        m
                    })
                })
                .collect();
        }
        monomials.sort_by(|a, b| {
            let (sa, sb): (u32, u32) = (a.iter().sum(), b.iter().sum());
            sa.cmp(&sb).then_with(|| b.cmp(a))
        });
        let n = monomials.len();
        let index = |m: &[u32]| monomials.iter().position(|x| x == m);
        let mut cup = Vec::with_capacity(r);
        for a in 0..r {
            let mut m = Matrix::zeros(n);
            for (i, mono) in monomials.iter().enumerate() {
                let mut next = mono.clone();
                next[a] += 1;
                if let Some(j) = index(&next) {
                    m.set(j, i, Laurent::one());
                }
            }
            cup.push(m);
        }
        let top: Vec<u32> = dims.iter().map(|&d| d as u32).collect();
        let mut pairing = Matrix::zeros(n);
        for (i, mi) in monomials.iter().enumerate() {
            for (j, mj) in monomials.iter().enumerate() {
                let sum: Vec<u32> = mi.iter().zip(mj).map(|(a, b)| a + b).collect();
                if sum == top {
                    pairing.set(i, j, Laurent::one());
                }
            }
        }
        let degrees = monomials.iter().map(|m| 2 * m.iter().sum::<u32>() as i64).collect();
        CohPresentation {
            basis_monomials: monomials,
            degrees,
            cup,
            pairing: Some(pairing),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis_monomials.len()
    }

    pub fn rank(&self) -> usize {
        self.cup.len()
    }

    pub fn basis_monomials(&self) -> &[Vec<u32>] {
        &self.basis_monomials
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn cup_matrices(&self) -> &[Matrix<F>] {
        &self.cup
    }

    pub fn cup(&self, a: usize) -> &Matrix<F> {
        &self.cup[a]
    }

    pub fn pairing(&self) -> Option<&Matrix<F>> {
        self.pairing.as_ref()
    }

    pub fn without_pairing(mut self) -> Self {
        self.pairing = None;
        self
    }

    /// Index of the basis element `p^μ`, if present.
    pub fn index_of(&self, mu: &[u32]) -> Option<usize> {
        self.basis_monomials.iter().position(|m| m == mu)
    }

    /// Index of `p_a` in the basis.
    pub fn divisor_index(&self, a: usize) -> Option<usize> {
        let mut mu = vec![0; self.rank()];
        mu[a] = 1;
        self.index_of(&mu)
    }

    /// The class `Σ_a c_a p_a` as a cup-product operator.
    pub fn class_operator(&self, coeffs: &[i64]) -> Matrix<F> {
        let mut m = Matrix::zeros(self.dim());
        for (a, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                m.add_assign_ref(&self.cup[a].scale_scalar(&F::from_int(c)));
            }
        }
        m
    }

    /// Apply `∏_a M_a^{μ(a)}` to a vector, factors in ascending `a`.
    pub fn apply_monomial(&self, mu: &[u32], v: &Vector<F>) -> Vector<F> {
        let mut out = v.clone();
        for (a, &k) in mu.iter().enumerate().rev() {
            for _ in 0..k {
                out = self.cup[a].mul_vec(&out);
            }
        }
        out
    }

    /// Check every presentation invariant; the error names the first failure.
    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        let r = self.rank();
        let invalid = |msg: String| Err(Error::Validation(msg));
        if n == 0 {
            return invalid("empty basis".into());
        }
        if r == 0 {
            return invalid("at least one degree-2 generator is required".into());
        }
        if self.degrees.len() != n {
            return invalid(format!("{} degrees for a basis of size {n}", self.degrees.len()));
        }
        for (i, mu) in self.basis_monomials.iter().enumerate() {
            if mu.len() != r {
                return invalid(format!("basis monomial {i} has length {}, expected {r}", mu.len()));
            }
            let expected = 2 * mu.iter().sum::<u32>() as i64;
            if self.degrees[i] != expected {
                return invalid(format!("degree of basis element {i} is {}, expected {expected}", self.degrees[i]));
            }
        }
        if self.basis_monomials[0].iter().any(|&k| k != 0) {
            return invalid("basis element 0 must be the unit".into());
        }
        for (a, m) in self.cup.iter().enumerate() {
            if m.dim() != n {
                return invalid(format!("cup matrix {a} has dimension {}, expected {n}", m.dim()));
            }
            for (i, j, e) in m.nonzero_entries() {
                if e.as_constant().is_none() {
                    return invalid(format!("cup matrix {a} has a non-constant entry at ({i},{j})"));
                }
                if self.degrees[i] != self.degrees[j] + 2 {
                    return invalid(format!("cup matrix {a} does not raise degree by 2 at ({i},{j})"));
                }
            }
        }
        for a in 0..r {
            for b in a + 1..r {
                if !self.cup[a].commutator(&self.cup[b]).is_zero() {
                    return invalid(format!("cup matrices {a} and {b} do not commute"));
                }
            }
            if !self.cup[a].pow(n as u32).is_zero() {
                return invalid(format!("cup matrix {a} is not nilpotent"));
            }
        }
        let unit = Vector::basis(n, 0);
        for (i, mu) in self.basis_monomials.iter().enumerate() {
            if self.apply_monomial(mu, &unit) != Vector::basis(n, i) {
                return invalid(format!("basis element {i} is not generated from the unit by its monomial"));
            }
        }
        if let Some(g) = &self.pairing {
            if g.dim() != n {
                return invalid("pairing has the wrong dimension".into());
            }
            if g.transpose() != *g {
                return invalid("pairing is not symmetric".into());
            }
            if g.nonzero_entries().any(|(_, _, e)| e.as_constant().is_none()) || g.try_inverse().is_err() {
                return invalid("pairing is degenerate".into());
            }
        }
        Ok(())
    }
}

/// Toric weight rows `u_i`, bundle rows `v_j`, and the cohomology of `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometryInput<F: Scalar> {
    pub name: String,
    weights: Vec<Vec<i64>>,
    bundle: Vec<Vec<i64>>,
    convex: bool,
    presentation: Option<CohPresentation<F>>,
}

impl<F: Scalar> GeometryInput<F> {
    pub fn new(
        name: impl Into<String>,
        weights: Vec<Vec<i64>>,
        bundle: Vec<Vec<i64>>,
        convex: bool,
        presentation: CohPresentation<F>,
    ) -> Result<Self> {
        let g = GeometryInput {
            name: name.into(),
            weights,
            bundle,
            convex,
            presentation: Some(presentation),
        };
        g.validate()?;
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        match &self.presentation {
            Some(p) => p.rank(),
            None => self.weights.first().map_or(0, Vec::len),
        }
    }

    pub fn weights(&self) -> &[Vec<i64>] {
        &self.weights
    }

    pub fn bundle(&self) -> &[Vec<i64>] {
        &self.bundle
    }

    pub fn convex(&self) -> bool {
        self.convex
    }

    pub fn presentation(&self) -> Result<&CohPresentation<F>> {
        self.presentation.as_ref().ok_or(Error::PresentationRequired)
    }

    /// Attach a cohomology presentation (e.g. to the output of [`nef_ambient`]).
    pub fn with_presentation(mut self, presentation: CohPresentation<F>) -> Result<Self> {
        self.presentation = Some(presentation);
        self.validate()?;
        Ok(self)
    }

    /// Same toric data without any twisting bundle.
    pub fn untwisted(&self) -> Self {
        GeometryInput {
            name: format!("{} (untwisted)", self.name),
            weights: self.weights.clone(),
            bundle: Vec::new(),
            convex: true,
            presentation: self.presentation.clone(),
        }
    }

    /// `c_1(X) − Σ v_j` in the nef basis.
    pub fn first_chern_minus_bundle(&self) -> Vec<i64> {
        let r = self.rank();
        let mut out = vec![0i64; r];
        for u in &self.weights {
            for a in 0..r {
                out[a] += u[a];
            }
        }
        for v in &self.bundle {
            for a in 0..r {
                out[a] -= v[a];
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.rank();
        if self.weights.is_empty() {
            return Err(Error::Validation("no weight rows".into()));
        }
        if let Some(p) = &self.presentation {
            p.validate()?;
        }
        for (i, u) in self.weights.iter().enumerate() {
            if u.len() != r {
                return Err(Error::Validation(format!("weight row {i} has length {}, expected r = {r}", u.len())));
            }
        }
        for (j, v) in self.bundle.iter().enumerate() {
            if v.len() != r {
                return Err(Error::Validation(format!("bundle row {j} has length {}, expected r = {r}", v.len())));
            }
            if self.convex && v.iter().any(|&x| x < 0) {
                return Err(Error::Validation(format!("bundle row {j} is not nef but the geometry is marked convex")));
            }
        }
        Ok(())
    }
}

/// `ℙ^{n_dim}` with the bundle `⊕_j 𝒪(k_j)`.
pub fn projective_space<F: Scalar>(n_dim: usize, twists: &[i64]) -> GeometryInput<F> {
    assert!(n_dim >= 1, "projective space needs positive dimension");
    let mut name = format!("P{n_dim}");
    if !twists.is_empty() {
        let parts: Vec<String> = twists.iter().map(|k| format!("O({k})")).collect();
        name = format!("{name}/{}", parts.join(","));
    }
    GeometryInput {
        name,
        weights: vec![vec![1]; n_dim + 1],
        bundle: twists.iter().map(|&k| vec![k]).collect(),
        convex: twists.iter().all(|&k| k >= 0),
        presentation: Some(CohPresentation::projective(n_dim)),
    }
}

/// `ℙ^{n_1} × … × ℙ^{n_r}` with bundle rows given in the product nef basis.
pub fn product_of_projective_spaces<F: Scalar>(dims: &[usize], bundle: &[Vec<i64>]) -> Result<GeometryInput<F>> {
    let r = dims.len();
    let mut weights = Vec::new();
    for (a, &n) in dims.iter().enumerate() {
        for _ in 0..=n {
            let mut u = vec![0; r];
            u[a] = 1;
            weights.push(u);
        }
    }
    let name = dims.iter().map(|n| format!("P{n}")).collect::<Vec<_>>().join("x");
    GeometryInput::new(
        name,
        weights,
        bundle.to_vec(),
        bundle.iter().all(|v| v.iter().all(|&x| x >= 0)),
        CohPresentation::product(dims),
    )
}

/// Nef ambient `Y`: weight row `u_i` repeated `1 + repeats[i]` times, with the
/// repeated divisor classes appended to the bundle. `Y`'s cohomology is not
/// synthesized; attach it with [`GeometryInput::with_presentation`].
pub fn nef_ambient<F: Scalar>(geom: &GeometryInput<F>, repeats: &[u32]) -> Result<GeometryInput<F>> {
    if repeats.len() != geom.weights.len() {
        return Err(Error::Validation(format!(
            "{} repeat counts for {} weight rows",
            repeats.len(),
            geom.weights.len()
        )));
    }
    let r = geom.rank();
    let mut c1 = vec![0i64; r];
    for (u, &k) in geom.weights.iter().zip(repeats) {
        for a in 0..r {
            c1[a] += (1 + k as i64) * u[a];
        }
    }
    if c1.iter().any(|&x| x < 0) {
        return Err(Error::NotNef(format!("c1 of the ambient would be {c1:?}")));
    }
    if repeats.iter().all(|&k| k == 0) {
        return Ok(geom.clone());
    }
    let mut weights = Vec::new();
    let mut bundle = geom.bundle.clone();
    for (u, &k) in geom.weights.iter().zip(repeats) {
        for _ in 0..=k {
            weights.push(u.clone());
        }
        for _ in 0..k {
            bundle.push(u.clone());
        }
    }
    let convex = bundle.iter().all(|v| v.iter().all(|&x| x >= 0));
    Ok(GeometryInput {
        name: format!("{} (nef ambient)", geom.name),
        weights,
        bundle,
        convex,
        presentation: None,
    })
}

/// Parse `builtin:P<n>[/O(k1),O(k2),…]`, or a product such as `builtin:P1xP1`.
pub fn builtin<F: Scalar>(spec: &str) -> Result<GeometryInput<F>> {
    let body = spec
        .strip_prefix("builtin:")
        .ok_or_else(|| Error::Config(format!("not a builtin geometry: {spec}")))?;
    let (space, twists) = match body.split_once('/') {
        Some((s, t)) => (s, Some(t)),
        None => (body, None),
    };
    let bad = || Error::Config(format!("cannot parse builtin geometry {spec:?}"));
    let dims = space
        .split('x')
        .map(|p| p.strip_prefix('P').and_then(|n| n.parse::<usize>().ok()).filter(|&n| n >= 1))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(bad)?;
    let mut bundle = Vec::new();
    if let Some(t) = twists {
        for part in split_twists(t) {
            let inner = part
                .strip_prefix("O(")
                .and_then(|x| x.strip_suffix(')'))
                .ok_or_else(bad)?;
            let row = inner
                .split(',')
                .map(|k| k.trim().parse::<i64>().ok())
                .collect::<Option<Vec<_>>>()
                .ok_or_else(bad)?;
            if row.len() != dims.len() {
                return Err(bad());
            }
            bundle.push(row);
        }
    }
    if dims.len() == 1 {
        let ks: Vec<i64> = bundle.iter().map(|v| v[0]).collect();
        Ok(projective_space(dims[0], &ks))
    } else {
        product_of_projective_spaces(&dims, &bundle)
    }
}

/// Split `O(1),O(2,3)` at top-level commas.
fn split_twists(text: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(text[start..].trim());
    parts.into_iter().filter(|p| !p.is_empty()).collect()
}

fn matrix_from_json<F: ExactScalar>(v: &Value, n: usize, what: &str) -> Result<Matrix<F>> {
    let rows = array(v, what)?;
    if rows.len() != n {
        return Err(Error::Schema(format!("{what}: expected {n} rows")));
    }
    let mut parsed = Vec::with_capacity(n);
    for row in rows {
        let row = array(row, what)?;
        if row.len() != n {
            return Err(Error::Schema(format!("{what}: expected {n} columns")));
        }
        parsed.push(row.iter().map(scalar_from_json).collect::<Result<Vec<F>>>()?);
    }
    Ok(Matrix::from_scalars(&parsed))
}

fn matrix_to_json<F: ExactScalar>(m: &Matrix<F>) -> Value {
    let n = m.dim();
    Value::Array(
        (0..n)
            .map(|i| {
                Value::Array(
                    (0..n)
                        .map(|j| {
                            let c = m.get(i, j).as_constant().expect("constant matrix");
                            let (num, den) = c.to_num_den();
                            if den == "1" {
                                Value::String(num)
                            } else {
                                scalar_to_json(&c)
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

fn int_rows(v: &Value, what: &str) -> Result<Vec<Vec<i64>>> {
    array(v, what)?
        .iter()
        .map(|row| array(row, what)?.iter().map(|x| int_from_json(x, what)).collect())
        .collect()
}

/// Parse and validate a geometry document.
pub fn load_geometry<F: ExactScalar>(document: &str) -> Result<GeometryInput<F>> {
    let v: Value = serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    geometry_from_json(&v)
}

pub fn geometry_from_json<F: ExactScalar>(v: &Value) -> Result<GeometryInput<F>> {
    let name = v["name"]
        .as_str()
        .ok_or_else(|| Error::Schema("missing \"name\"".into()))?
        .to_string();
    let r = int_from_json(&v["r"], "r")? as usize;
    let weights = int_rows(&v["weights"], "weights")?;
    let bundle = match &v["bundle"] {
        Value::Null => Vec::new(),
        b => int_rows(b, "bundle")?,
    };
    let convex = v["convex"]
        .as_bool()
        .ok_or_else(|| Error::Schema("missing boolean \"convex\"".into()))?;
    let coh = &v["cohomology"];
    if !coh.is_object() {
        return Err(Error::Schema("missing \"cohomology\" object".into()));
    }
    let n = int_from_json(&coh["n"], "n")? as usize;
    let basis_monomials = int_rows(&coh["basis_monomials"], "basis_monomials")?
        .into_iter()
        .map(|m| {
            m.into_iter()
                .map(|x| u32::try_from(x).map_err(|_| Error::Schema("negative monomial exponent".into())))
                .collect::<Result<Vec<u32>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if basis_monomials.len() != n {
        return Err(Error::Schema(format!("{} basis monomials, expected n = {n}", basis_monomials.len())));
    }
    let degrees = array(&coh["degrees"], "degrees")?
        .iter()
        .map(|x| int_from_json(x, "degrees"))
        .collect::<Result<Vec<_>>>()?;
    let cup = array(&coh["cup_matrices"], "cup_matrices")?
        .iter()
        .map(|m| matrix_from_json(m, n, "cup_matrices"))
        .collect::<Result<Vec<_>>>()?;
    if cup.len() != r {
        return Err(Error::Schema(format!("{} cup matrices, expected r = {r}", cup.len())));
    }
    let pairing = match &coh["pairing"] {
        Value::Null => None,
        m => Some(matrix_from_json(m, n, "pairing")?),
    };
    let presentation = CohPresentation::new(basis_monomials, degrees, cup, pairing)?;
    GeometryInput::new(name, weights, bundle, convex, presentation)
}

pub fn geometry_to_json<F: ExactScalar>(g: &GeometryInput<F>) -> Result<Value> {
    let p = g.presentation()?;
    Ok(json!({
        "name": g.name,
        "r": g.rank(),
        "weights": g.weights,
        "bundle": g.bundle,
        "convex": g.convex,
        "cohomology": {
            "n": p.dim(),
            "basis_monomials": p.basis_monomials,
            "degrees": p.degrees,
            "cup_matrices": p.cup.iter().map(matrix_to_json).collect::<Vec<_>>(),
            "pairing": p.pairing.as_ref().map(matrix_to_json),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type G = GeometryInput<Rational>;

    #[test]
    fn projective_space_data() {
        let g: G = projective_space(7, &[9]);
        assert_eq!(g.weights().len(), 8);
        assert!(g.weights().iter().all(|u| u == &vec![1]));
        assert_eq!(g.bundle(), &[vec![9]]);
        let p = g.presentation().unwrap();
        assert_eq!(p.dim(), 8);
        assert!(p.cup(0).pow(8).is_zero());
        assert!(!p.cup(0).pow(7).is_zero());

        let p1: G = projective_space(1, &[]);
        assert_eq!(p1.weights().len(), 2);
        assert!(p1.bundle().is_empty());
        assert_eq!(p1.presentation().unwrap().dim(), 2);
    }

    #[test]
    fn projective_pairing_is_antidiagonal() {
        let p = CohPresentation::<Rational>::projective(4);
        let g = p.pairing().unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let expected = if i + j == 4 { Laurent::one() } else { Laurent::zero() };
                assert_eq!(g.get(i, j), &expected);
            }
        }
    }

    #[test]
    fn product_presentation_is_valid() {
        let p = CohPresentation::<Rational>::product(&[1, 2]);
        assert_eq!(p.dim(), 6);
        p.validate().unwrap();
        assert_eq!(p.divisor_index(0), Some(1));
        assert_eq!(p.divisor_index(1), Some(2));
    }

    #[test]
    fn non_commuting_cup_matrices_are_rejected() {
        // basis 1, p1, p2, top; p1*p2 = top but p2*p1 = 0
        let n = 4;
        let mut m1 = Matrix::<Rational>::zeros(n);
        m1.set(1, 0, Laurent::one());
        m1.set(3, 2, Laurent::one());
        let mut m2 = Matrix::zeros(n);
        m2.set(2, 0, Laurent::one());
        let err = CohPresentation::new(
            vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]],
            vec![0, 2, 2, 4],
            vec![m1, m2],
            None,
        )
        .unwrap_err();
        assert_eq!(err, Error::Validation("cup matrices 0 and 1 do not commute".into()));
    }

    #[test]
    fn nef_ambient_examples() {
        let p1: G = projective_space(1, &[]);
        assert_eq!(nef_ambient(&p1, &[0, 0]).unwrap(), p1);
        let y = nef_ambient(&p1, &[1, 0]).unwrap();
        assert_eq!(y.weights(), &[vec![1], vec![1], vec![1]]);
        assert_eq!(y.bundle(), &[vec![1]]);
        assert_eq!(y.presentation().unwrap_err(), Error::PresentationRequired);

        let p2: G = projective_space(2, &[]);
        let y = nef_ambient(&p2, &[0, 0, 2]).unwrap();
        assert_eq!(y.weights().len(), 5);
        assert_eq!(y.bundle(), &[vec![1], vec![1]]);
        // attach P^4's ring: the complete intersection of two hyperplanes
        let y = y.with_presentation(CohPresentation::projective(4)).unwrap();
        assert_eq!(y.presentation().unwrap().dim(), 5);
    }

    #[test]
    fn nef_ambient_rejects_negative_c1() {
        let p = CohPresentation::<Rational>::projective(1);
        let g = GeometryInput::new("neg", vec![vec![1], vec![-3]], vec![], true, p).unwrap();
        assert!(matches!(nef_ambient(&g, &[0, 0]), Err(Error::NotNef(_))));
        assert!(nef_ambient(&g, &[2, 0]).is_ok());
    }

    #[test]
    fn builtin_parsing() {
        let g: G = builtin("builtin:P7/O(9)").unwrap();
        assert_eq!(g, projective_space(7, &[9]));
        let g: G = builtin("builtin:P4/O(2),O(3)").unwrap();
        assert_eq!(g.bundle(), &[vec![2], vec![3]]);
        let g: G = builtin("builtin:P1xP2/O(1,1)").unwrap();
        assert_eq!(g.rank(), 2);
        assert_eq!(g.weights().len(), 5);
        assert!(builtin::<Rational>("builtin:Q3").is_err());
        assert!(builtin::<Rational>("builtin:P1xP1/O(1)").is_err());
    }

    #[test]
    fn json_round_trip_and_missing_pairing() {
        let g: G = projective_space(3, &[2]);
        let v = geometry_to_json(&g).unwrap();
        let back: G = geometry_from_json(&v).unwrap();
        assert_eq!(back, g);

        let mut v2 = v.clone();
        v2["cohomology"]["pairing"] = Value::Null;
        let back: G = geometry_from_json(&v2).unwrap();
        assert!(back.presentation().unwrap().pairing().is_none());

        let mut v3 = v;
        v3["cohomology"]["degrees"] = json!([0, 2, 4]);
        assert!(geometry_from_json::<Rational>(&v3).is_err());
        assert!(matches!(load_geometry::<Rational>("{not json"), Err(Error::Schema(_))));
    }
}
