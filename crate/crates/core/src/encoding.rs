//! JSON encoding of coefficients, vectors, matrices and Novikov series.
//!
//! * scalar coefficient: `[{"h": int, "lam": int, "num": "…", "den": "…"}, …]`
//! * vector: array of scalar coefficients
//! * matrix: array of rows, each an array of scalar coefficients
//! * series: `[{"d": [int, …], "value": …}, …]`
//! * t-polynomial: `[{"t": [int, …], "series": series}, …]`
//!
//! Integers are decimal strings so arbitrarily large values survive.

use serde_json::{json, Value};

use crate::algebra::Coeff;
use crate::bigrecon::TPolySeries;
use crate::error::{Error, Result};
use crate::laurent::Laurent;
use crate::matrix::{Matrix, Vector};
use crate::novikov::{NovikovExponent, NovikovSeries, Truncation};
use crate::scalar::ExactScalar;

/// Conversion to and from the JSON wire format.
pub trait JsonCodec: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

/// Scalar as `{"num": "…", "den": "…"}`.
pub fn scalar_to_json<F: ExactScalar>(c: &F) -> Value {
    let (num, den) = c.to_num_den();
    json!({"num": num, "den": den})
}

/// Accepts `{"num","den"}`, a decimal string (`"n"` or `"n/d"`), or a JSON integer.
pub fn scalar_from_json<F: ExactScalar>(v: &Value) -> Result<F> {
    match v {
        Value::Object(map) => {
            let num = map.get("num").ok_or_else(|| schema("rational needs \"num\""))?;
            let den = map.get("den").map(text_of).transpose()?.unwrap_or_else(|| "1".into());
            F::from_num_den(&text_of(num)?, &den)
        }
        Value::String(s) => match s.split_once('/') {
            Some((n, d)) => F::from_num_den(n, d),
            None => F::from_num_den(s, "1"),
        },
        Value::Number(n) if n.is_i64() || n.is_u64() => F::from_num_den(&n.to_string(), "1"),
        other => Err(schema(format!("expected a rational, found {other}"))),
    }
}

fn text_of(v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string()),
        other => Err(schema(format!("expected a decimal integer, found {other}"))),
    }
}

pub(crate) fn int_from_json(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema(format!("{what}: expected an integer, found {v}")))
}

pub(crate) fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(format!("{what}: expected an array")))
}

impl<F: ExactScalar> JsonCodec for Laurent<F> {
    fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|((h, lam), c)| {
                    let (num, den) = c.to_num_den();
                    json!({"h": h, "lam": lam, "num": num, "den": den})
                })
                .collect(),
        )
    }

    fn from_json(v: &Value) -> Result<Self> {
        let mut out = Laurent::zero();
        for term in array(v, "coefficient")? {
            let h = int_from_json(&term["h"], "h")?;
            let lam = int_from_json(&term["lam"], "lam")?;
            if lam < 0 {
                return Err(schema("lambda exponent must be nonnegative"));
            }
            let c: F = scalar_from_json(term)?;
            out.add_term(h as i32, lam as u32, c);
        }
        Ok(out)
    }
}

impl<F: ExactScalar> JsonCodec for Vector<F> {
    fn to_json(&self) -> Value {
        Value::Array(self.entries().iter().map(JsonCodec::to_json).collect())
    }

    fn from_json(v: &Value) -> Result<Self> {
        let entries = array(v, "vector")?
            .iter()
            .map(Laurent::from_json)
            .collect::<Result<Vec<_>>>()?;
        Ok(Vector::from_entries(entries))
    }
}

impl<F: ExactScalar> JsonCodec for Matrix<F> {
    fn to_json(&self) -> Value {
        let n = self.dim();
        Value::Array(
            (0..n)
                .map(|i| Value::Array((0..n).map(|j| self.get(i, j).to_json()).collect()))
                .collect(),
        )
    }

    fn from_json(v: &Value) -> Result<Self> {
        let rows = array(v, "matrix")?;
        let n = rows.len();
        let mut m = Matrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            let row = array(row, "matrix row")?;
            if row.len() != n {
                return Err(schema("matrix must be square"));
            }
            for (j, e) in row.iter().enumerate() {
                m.set(i, j, Laurent::from_json(e)?);
            }
        }
        Ok(m)
    }
}

/// Series entries in key order; the truncation travels separately.
pub fn series_to_json<T: Coeff + JsonCodec>(s: &NovikovSeries<T>) -> Value {
    Value::Array(
        s.iter()
            .map(|(d, c)| json!({"d": d.0, "value": c.to_json()}))
            .collect(),
    )
}

pub fn series_from_json<T: Coeff + JsonCodec>(v: &Value, trunc: &Truncation) -> Result<NovikovSeries<T>> {
    let mut out = NovikovSeries::zero(trunc.clone());
    for entry in array(v, "series")? {
        let d = array(&entry["d"], "d")?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|k| k as u32)
                    .ok_or_else(|| schema("Novikov exponents must be nonnegative integers"))
            })
            .collect::<Result<Vec<_>>>()?;
        let d = NovikovExponent(d);
        if !trunc.admits(&d) {
            return Err(schema(format!("exponent {d:?} lies outside the truncation")));
        }
        out.add_term(d, T::from_json(&entry["value"])?);
    }
    Ok(out)
}

/// Keyed by t-monomial, then Novikov exponent.
pub fn tpoly_to_json<T: Coeff + JsonCodec>(p: &TPolySeries<T>) -> Value {
    Value::Array(
        p.iter()
            .map(|(alpha, s)| json!({"t": alpha, "series": series_to_json(s)}))
            .collect(),
    )
}

pub fn tpoly_from_json<T: Coeff + JsonCodec>(
    v: &Value,
    nvars: usize,
    order: u32,
    trunc: &Truncation,
) -> Result<TPolySeries<T>> {
    let mut out = TPolySeries::zero(nvars, order, trunc.clone());
    for entry in array(v, "t-polynomial")? {
        let alpha = array(&entry["t"], "t")?
            .iter()
            .map(|x| x.as_u64().map(|k| k as u32).ok_or_else(|| schema("t exponents must be nonnegative integers")))
            .collect::<Result<Vec<_>>>()?;
        if alpha.len() != nvars || alpha.iter().sum::<u32>() > order {
            return Err(schema(format!("t-monomial {alpha:?} does not fit {nvars} variables of order {order}")));
        }
        out.add_term(alpha, series_from_json(&entry["series"], trunc)?);
    }
    Ok(out)
}

pub fn truncation_to_json(t: &Truncation) -> Value {
    json!({"order": t.order(), "weights": t.weights()})
}

pub fn truncation_from_json(v: &Value) -> Result<Truncation> {
    let order = int_from_json(&v["order"], "order")?;
    let weights = array(&v["weights"], "weights")?
        .iter()
        .map(|w| int_from_json(w, "weight").map(|x| x as u32))
        .collect::<Result<Vec<_>>>()?;
    Truncation::new(order as u32, weights)
}
