//! Flat tables for `--format text` and `--format csv`.
//!
//! Every stage flattens to rows `(object, index, t, q, row, col, value)`;
//! columns that do not apply are left empty.

use gmt_core::bigrecon::TPolySeries;
use gmt_core::laurent::Laurent;
use gmt_core::matrix::{Matrix, Vector};
use gmt_core::novikov::{NovikovExponent, NovikovSeries};
use gmt_core::pipeline::{Artifacts, Stage};
use gmt_core::Rational;

pub const COLUMNS: [&str; 7] = ["object", "index", "t", "q", "row", "col", "value"];

pub type Row = [String; 7];

fn monomial(var: &str, exps: &[u32], single: bool) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(k, &e)| {
            let name = if single { var.to_string() } else { format!("{var}{k}") };
            if e == 1 { name } else { format!("{name}^{e}") }
        })
        .collect();
    if parts.is_empty() { "1".into() } else { parts.join("*") }
}

fn q_text(d: &NovikovExponent) -> String {
    monomial("Q", &d.0, d.0.len() == 1)
}

struct Sink {
    rows: Vec<Row>,
}

impl Sink {
    fn push(&mut self, object: &str, index: String, t: String, q: String, row: String, col: String, value: &Laurent<Rational>) {
        if !value.is_zero() {
            self.rows.push([object.into(), index, t, q, row, col, value.to_string()]);
        }
    }

    fn matrix(&mut self, object: &str, index: String, t: String, q: String, m: &Matrix<Rational>) {
        for (i, j, e) in m.nonzero_entries() {
            self.push(object, index.clone(), t.clone(), q.clone(), i.to_string(), j.to_string(), e);
        }
    }

    fn matrix_series(&mut self, object: &str, index: String, t: String, s: &NovikovSeries<Matrix<Rational>>) {
        for (d, m) in s.iter() {
            self.matrix(object, index.clone(), t.clone(), q_text(d), m);
        }
    }

    fn vector_series(&mut self, object: &str, s: &NovikovSeries<Vector<Rational>>) {
        for (d, v) in s.iter() {
            for (i, e) in v.entries().iter().enumerate() {
                self.push(object, String::new(), String::new(), q_text(d), i.to_string(), String::new(), e);
            }
        }
    }

    fn scalar_series(&mut self, object: &str, index: String, t: String, s: &NovikovSeries<Laurent<Rational>>) {
        for (d, e) in s.iter() {
            self.push(object, index.clone(), t.clone(), q_text(d), String::new(), String::new(), e);
        }
    }

    fn tpoly_matrix(&mut self, object: &str, index: usize, p: &TPolySeries<Matrix<Rational>>) {
        for (alpha, s) in p.iter() {
            self.matrix_series(object, index.to_string(), monomial("t", alpha, false), s);
        }
    }

    fn tpoly_scalar(&mut self, object: &str, index: String, row: String, col: String, p: &TPolySeries<Laurent<Rational>>) {
        for (alpha, s) in p.iter() {
            for (d, e) in s.iter() {
                self.push(object, index.clone(), monomial("t", alpha, false), q_text(d), row.clone(), col.clone(), e);
            }
        }
    }
}

pub fn rows(stage: Stage, art: &Artifacts<Rational>) -> Vec<Row> {
    let mut sink = Sink { rows: Vec::new() };
    match stage {
        Stage::IFunction => {
            if let Some(i) = &art.i_function {
                sink.vector_series("I", i);
            }
        }
        Stage::Connection => {
            if let Some(c) = &art.connection {
                for (a, m) in c.matrices.iter().enumerate() {
                    sink.matrix_series("A", a.to_string(), String::new(), m);
                }
            }
            for (k, s) in art.oracle.iter().flatten().enumerate() {
                sink.scalar_series("C", k.to_string(), String::new(), s);
            }
        }
        Stage::Canonical => {
            for (a, m) in art.canonical.iter().flatten().enumerate() {
                sink.matrix_series("A_canonical", a.to_string(), String::new(), m);
            }
            if let Some(j) = &art.j_function {
                sink.vector_series("J", j);
            }
        }
        Stage::Reconstruct => {
            if let Some(b) = &art.big {
                for (a, p) in b.big_a.iter().enumerate() {
                    sink.tpoly_matrix("bigA", a, p);
                }
                for (k, p) in b.big_omega.iter().enumerate() {
                    sink.tpoly_matrix("bigOmega", k, p);
                }
            }
        }
        Stage::Products => {
            if let Some(m) = &art.mirror_map {
                for (k, g) in m.g.iter().enumerate() {
                    sink.scalar_series("g", k.to_string(), String::new(), g);
                }
            }
            if let Some(t) = &art.products {
                for (k, p) in t.structure.iter().enumerate() {
                    sink.tpoly_matrix("product", k, p);
                }
            }
            if let Some(l) = &art.locus {
                for (k, m) in l.products.iter().enumerate() {
                    sink.matrix_series("locus_product", k.to_string(), String::new(), m);
                }
            }
        }
        Stage::Gw => {
            if let Some(g) = &art.gw {
                sink.push("k", String::new(), String::new(), String::new(), String::new(), String::new(), &Laurent::constant(g.k.clone()));
                sink.matrix("twisted_pairing", String::new(), String::new(), String::new(), &g.twisted_pairing);
                for (name, tensor) in [("three_point", &g.three_point), ("divided_by_k", &g.divided_by_k)] {
                    for (i, a) in tensor.iter().enumerate() {
                        for (j, b) in a.iter().enumerate() {
                            for (l, p) in b.iter().enumerate() {
                                sink.tpoly_scalar(name, i.to_string(), j.to_string(), l.to_string(), p);
                            }
                        }
                    }
                }
                sink.tpoly_scalar("F_ppp", String::new(), String::new(), String::new(), &g.potential_third_derivative);
            }
        }
        Stage::Verify => {
            if let Some(v) = &art.verify {
                for c in &v.checks {
                    let status = if c.passed { "PASS".to_string() } else { format!("FAIL {}", c.detail) };
                    sink.rows.push([c.name.clone(), String::new(), String::new(), String::new(), String::new(), String::new(), status]);
                }
            }
        }
    }
    sink.rows
}

/// Columns padded to a common width; empty columns are dropped.
pub fn text_table(rows: &[Row]) -> String {
    let used: Vec<usize> = (0..COLUMNS.len())
        .filter(|&c| c == 0 || c == COLUMNS.len() - 1 || rows.iter().any(|r| !r[c].is_empty()))
        .collect();
    let width = |c: usize| rows.iter().map(|r| r[c].chars().count()).chain([COLUMNS[c].len()]).max().unwrap_or(0);
    let widths: Vec<usize> = used.iter().map(|&c| width(c)).collect();
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .enumerate()
            .map(|(i, (s, &w))| if i + 1 == cells.len() { s.to_string() } else { format!("{s:<w$}") })
            .collect();
        out.push_str(padded.join("  ").trim_end());
        out.push('\n');
    };
    line(used.iter().map(|&c| COLUMNS[c]).collect());
    for r in rows {
        line(used.iter().map(|&c| r[c].as_str()).collect());
    }
    out
}

pub fn csv_table(rows: &[Row]) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
