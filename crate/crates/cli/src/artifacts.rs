//! One JSON document per stage, and reading those documents back so a later
//! stage can resume from files.

use serde_json::{json, Map, Value};

use gmt_core::bigrecon::{BigConnection, ReconMode, TPolySeries};
use gmt_core::birkhoff::BirkhoffFactors;
use gmt_core::connection::SmallConnection;
use gmt_core::encoding::{
    scalar_from_json, scalar_to_json, series_from_json, series_to_json, tpoly_from_json, tpoly_to_json,
    truncation_to_json, JsonCodec,
};
use gmt_core::geometry::{geometry_to_json, GeometryInput};
use gmt_core::ifunction::{frame_columns, LambdaMode};
use gmt_core::laurent::Laurent;
use gmt_core::matrix::Matrix;
use gmt_core::mirrormap::{GwReport, Locus, MirrorMap, QuantumProductTable};
use gmt_core::novikov::Truncation;
use gmt_core::pipeline::{Artifacts, RunConfig, Stage};
use gmt_core::{Error, Rational, Result};

fn lambda_name(l: LambdaMode) -> &'static str {
    match l {
        LambdaMode::Zero => "zero",
        LambdaMode::Poly => "poly",
    }
}

fn mode_name(m: ReconMode) -> &'static str {
    match m {
        ReconMode::Reduced => "reduced",
        ReconMode::Full => "full",
    }
}

/// Everything an artifact's content depends on. Two artifacts with equal
/// headers are interchangeable.
fn header(stage: Stage, geom: &GeometryInput<Rational>, config: &RunConfig, trunc: &Truncation) -> Result<Map<String, Value>> {
    let mut h = Map::new();
    h.insert("stage".into(), json!(stage.name()));
    h.insert("geometry".into(), geometry_to_json(geom)?);
    h.insert("truncation".into(), truncation_to_json(trunc));
    h.insert("lambda".into(), json!(lambda_name(config.lambda)));
    if stage >= Stage::Reconstruct {
        h.insert("t_order".into(), json!(config.t_order));
        h.insert("mode".into(), json!(mode_name(config.mode)));
    }
    Ok(h)
}

fn series_list<T: gmt_core::algebra::Coeff + JsonCodec>(v: &[gmt_core::novikov::NovikovSeries<T>]) -> Value {
    Value::Array(v.iter().map(series_to_json).collect())
}

fn tpoly_list<T: gmt_core::algebra::Coeff + JsonCodec>(v: &[TPolySeries<T>]) -> Value {
    Value::Array(v.iter().map(tpoly_to_json).collect())
}

fn tensor_json(t: &[Vec<Vec<TPolySeries<Laurent<Rational>>>>]) -> Value {
    let mut out = Vec::new();
    for (i, a) in t.iter().enumerate() {
        for (j, b) in a.iter().enumerate() {
            for (l, p) in b.iter().enumerate() {
                if !p.is_zero() {
                    out.push(json!({"i": i, "j": j, "l": l, "value": tpoly_to_json(p)}));
                }
            }
        }
    }
    Value::Array(out)
}

/// The artifact of `stage`, or `None` when the run did not produce it.
pub fn encode(
    stage: Stage,
    geom: &GeometryInput<Rational>,
    config: &RunConfig,
    art: &Artifacts<Rational>,
) -> Result<Option<Value>> {
    let Some(trunc) = &art.truncation else { return Ok(None) };
    let mut doc = header(stage, geom, config, trunc)?;
    let mut put = |k: &str, v: Value| {
        doc.insert(k.into(), v);
    };
    match stage {
        Stage::IFunction => {
            let Some(i) = &art.i_function else { return Ok(None) };
            put("series", series_to_json(i));
        }
        Stage::Connection => {
            let Some(c) = &art.connection else { return Ok(None) };
            put("matrices", series_list(&c.matrices));
            if let Some(o) = &art.oracle {
                put("oracle", series_list(o));
            }
        }
        Stage::Canonical => {
            let (Some(c), Some(f), Some(j)) = (&art.canonical, &art.factors, &art.j_function) else {
                return Ok(None);
            };
            put("matrices", series_list(c));
            put("j", series_to_json(j));
            put("l_plus", series_to_json(&f.l_plus));
        }
        Stage::Reconstruct => {
            let Some(b) = &art.big else { return Ok(None) };
            put("variables", json!(b.variables));
            put("big_a", tpoly_list(&b.big_a));
            put("big_omega", tpoly_list(&b.big_omega));
        }
        Stage::Products => {
            let (Some(m), Some(t)) = (&art.mirror_map, &art.products) else { return Ok(None) };
            put("mirror_map", series_list(&m.g));
            put("variables", json!(t.variables));
            put("structure", tpoly_list(&t.structure));
            if let Some(l) = &art.locus {
                put("locus", json!({"coordinates": series_list(&l.coordinates), "products": series_list(&l.products)}));
            }
        }
        Stage::Gw => {
            let Some(g) = &art.gw else { return Ok(None) };
            put("k", scalar_to_json(&g.k));
            put("twisted_pairing", g.twisted_pairing.to_json());
            put("three_point", tensor_json(&g.three_point));
            put("divided_by_k", tensor_json(&g.divided_by_k));
            put("potential_third_derivative", tpoly_to_json(&g.potential_third_derivative));
        }
        Stage::Verify => {
            let Some(v) = &art.verify else { return Ok(None) };
            let checks: Vec<Value> = v
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
                .collect();
            put("passed", json!(v.all_passed()));
            put("checks", Value::Array(checks));
        }
    }
    Ok(Some(Value::Object(doc)))
}

fn schema(msg: impl Into<String>) -> Error {
    Error::Schema(msg.into())
}

fn list<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    v[key].as_array().ok_or_else(|| schema(format!("artifact field {key:?} must be an array")))
}

fn series_vec<T: gmt_core::algebra::Coeff + JsonCodec>(
    v: &Value,
    key: &str,
    trunc: &Truncation,
) -> Result<Vec<gmt_core::novikov::NovikovSeries<T>>> {
    list(v, key)?.iter().map(|s| series_from_json(s, trunc)).collect()
}

fn tpoly_vec(v: &Value, key: &str, nvars: usize, order: u32, trunc: &Truncation) -> Result<Vec<TPolySeries<Matrix<Rational>>>> {
    list(v, key)?.iter().map(|s| tpoly_from_json(s, nvars, order, trunc)).collect()
}

fn usize_vec(v: &Value, key: &str) -> Result<Vec<usize>> {
    list(v, key)?
        .iter()
        .map(|x| x.as_u64().map(|k| k as usize).ok_or_else(|| schema(format!("{key}: expected indices"))))
        .collect()
}

fn tensor_from(v: &Value, key: &str, n: usize, nvars: usize, order: u32, trunc: &Truncation) -> Result<Vec<Vec<Vec<TPolySeries<Laurent<Rational>>>>>> {
    let zero = TPolySeries::zero(nvars, order, trunc.clone());
    let mut out = vec![vec![vec![zero; n]; n]; n];
    for e in list(v, key)? {
        let idx = |k: &str| e[k].as_u64().map(|x| x as usize).filter(|&x| x < n).ok_or_else(|| schema("bad tensor index"));
        out[idx("i")?][idx("j")?][idx("l")?] = tpoly_from_json(&e["value"], nvars, order, trunc)?;
    }
    Ok(out)
}

/// Fold a previously written artifact into `art` if its header matches the
/// current configuration; returns whether it was used.
pub fn absorb(
    doc: &Value,
    geom: &GeometryInput<Rational>,
    config: &RunConfig,
    art: &mut Artifacts<Rational>,
) -> Result<bool> {
    let Some(stage) = doc["stage"].as_str().and_then(|s| s.parse::<Stage>().ok()) else {
        return Ok(false);
    };
    let pres = geom.presentation()?;
    let trunc = config.truncation(pres.rank())?;
    let expected = header(stage, geom, config, &trunc)?;
    if expected.iter().any(|(k, v)| &doc[k] != v) {
        return Ok(false);
    }
    let n = pres.dim();
    let (nvars, order) = (n, config.t_order);
    match stage {
        Stage::IFunction => art.i_function = Some(series_from_json(&doc["series"], &trunc)?),
        Stage::Connection => {
            art.connection = Some(SmallConnection { matrices: series_vec(doc, "matrices", &trunc)? });
            if doc.get("oracle").is_some() {
                art.oracle = Some(series_vec(doc, "oracle", &trunc)?);
            }
        }
        Stage::Canonical => {
            let Some(i) = &art.i_function else { return Ok(false) };
            let l_plus = series_from_json(&doc["l_plus"], &trunc)?;
            let l_minus_inv = frame_columns(pres, i).mul(&l_plus);
            art.factors = Some(BirkhoffFactors { l_plus, l_minus_inv });
            art.canonical = Some(series_vec(doc, "matrices", &trunc)?);
        }
        Stage::Reconstruct => {
            art.big = Some(BigConnection {
                big_a: tpoly_vec(doc, "big_a", nvars, order, &trunc)?,
                big_omega: tpoly_vec(doc, "big_omega", nvars, order, &trunc)?,
                mode: config.mode,
                variables: usize_vec(doc, "variables")?,
            });
        }
        Stage::Products => {
            art.mirror_map = Some(MirrorMap { g: series_vec(doc, "mirror_map", &trunc)? });
            art.products = Some(QuantumProductTable {
                structure: tpoly_vec(doc, "structure", nvars, order, &trunc)?,
                variables: usize_vec(doc, "variables")?,
            });
            if let Some(l) = doc.get("locus") {
                art.locus = Some(Locus {
                    coordinates: series_vec(l, "coordinates", &trunc)?,
                    products: series_vec(l, "products", &trunc)?,
                });
            }
        }
        Stage::Gw => {
            art.gw = Some(GwReport {
                k: scalar_from_json(&doc["k"])?,
                twisted_pairing: Matrix::from_json(&doc["twisted_pairing"])?,
                three_point: tensor_from(doc, "three_point", n, nvars, order, &trunc)?,
                divided_by_k: tensor_from(doc, "divided_by_k", n, nvars, order, &trunc)?,
                potential_third_derivative: tpoly_from_json(&doc["potential_third_derivative"], nvars, order, &trunc)?,
            });
        }
        Stage::Verify => return Ok(false),
    }
    Ok(true)
}
