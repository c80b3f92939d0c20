use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;

const GMT: &str = env!("CARGO_BIN_EXE_gmt");

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn gmt(args: &[&str]) -> Output {
    Command::new(GMT).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    gmt(args).status.code().unwrap()
}

fn diagnostic(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("stderr is not JSON: {}", String::from_utf8_lossy(&out.stderr)))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

#[test]
fn p1_verify_is_quick() {
    let start = Instant::now();
    let out = gmt(&["run", "builtin:P1", "--stages", "verify"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(start.elapsed().as_secs_f64() < 1.0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["stage"], "verify");
    assert_eq!(v["passed"], true);
}

#[test]
fn configuration_errors_exit_2() {
    assert_eq!(code(&["run", "builtin:P2", "--q-order", "0"]), 2);
    assert_eq!(code(&["run", "builtin:P2", "--stages", "ifunction,mirror"]), 2);
    assert_eq!(code(&["run", "builtin:Q3"]), 2);
    assert_eq!(code(&["run", "builtin:P2", "--lambda", "half"]), 2);
    assert_eq!(code(&["run", "builtin:P2", "--weights", "1,1"]), 2);
    assert_eq!(code(&["connection", "builtin:P1xP1", "--oracle"]), 2);
    assert_eq!(code(&["gw", "builtin:P2/O(3)", "--lambda", "poly"]), 2);
    assert_eq!(code(&["run", "/nonexistent/geometry.json"]), 2);
    let out = gmt(&["run", "builtin:P2", "--mode", "partial"]);
    assert_eq!(diagnostic(&out)["error"], "Config");
}

#[test]
fn validation_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"name": "x", "r": 1, "weights": [[1], [1]], "convex": true}"#).unwrap();
    assert_eq!(code(&["ifunction", bad.to_str().unwrap()]), 3);

    let out = gmt(&["gw", "builtin:P2"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(diagnostic(&out)["exit_code"], 3);
    assert_eq!(diagnostic(&gmt(&["gw", "builtin:P1xP1/O(1,1)"]))["error"], "NotRankOne");
    // a non-convex bundle at λ = 0
    assert_eq!(code(&["ifunction", "builtin:P2/O(-1)"]), 3);
}

#[test]
fn tampered_artifacts_exit_4_with_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(code(&["run", "builtin:P2/O(3)", "--q-order", "3", "--t-order", "2", "--out", out]), 0);
    let path = dir.path().join("canonical.json");
    let mut doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    // bump the first nonzero coefficient above Q^0
    let entry = doc["matrices"][0]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .filter(|term| term["d"][0] != 0)
        .flat_map(|term| term["value"].as_array_mut().unwrap().iter_mut().flat_map(|row| row.as_array_mut().unwrap()))
        .find_map(|e| e.as_array_mut().unwrap().first_mut())
        .expect("a nonzero correction");
    let bumped = entry["num"].as_str().unwrap().parse::<i64>().unwrap() + 1;
    entry["num"] = Value::String(bumped.to_string());
    fs::write(&path, doc.to_string()).unwrap();

    let res = gmt(&["run", "builtin:P2/O(3)", "--q-order", "3", "--t-order", "2", "--stages", "verify", "--out", out]);
    assert_eq!(res.status.code(), Some(4));
    let d = diagnostic(&res);
    assert_eq!(d["error"], "Invariant");
    assert!(d["message"].as_str().unwrap().contains("witness"), "{d}");
}

#[test]
fn stages_compose_through_files() {
    let g = "builtin:P4/O(5)";
    let common = ["--q-order", "3", "--t-order", "3"];
    let together = tempfile::tempdir().unwrap();
    let again = tempfile::tempdir().unwrap();
    let apart = tempfile::tempdir().unwrap();
    for dir in [&together, &again] {
        let mut args = vec!["run", g, "--out", dir.path().to_str().unwrap()];
        args.extend(common);
        assert_eq!(code(&args), 0);
    }
    for stage in ["ifunction", "connection", "canonical", "reconstruct", "products", "gw"] {
        let mut args = vec![stage, g, "--out", apart.path().to_str().unwrap()];
        args.extend(common);
        assert_eq!(code(&args), 0, "{stage}");
    }
    let mut args = vec!["run", g, "--stages", "verify", "--out", apart.path().to_str().unwrap()];
    args.extend(common);
    assert_eq!(code(&args), 0);

    let reference = files(together.path());
    assert_eq!(reference.len(), 7);
    assert_eq!(files(again.path()), reference);
    assert_eq!(files(apart.path()), reference);
}

#[test]
fn lower_q_order_is_a_prefix() {
    let lo = gmt(&["canonical", &fixture("p7_o9.json"), "--q-order", "3"]);
    let hi = gmt(&["canonical", &fixture("p7_o9.json"), "--q-order", "6"]);
    let lo: Value = serde_json::from_slice(&lo.stdout).unwrap();
    let hi: Value = serde_json::from_slice(&hi.stdout).unwrap();
    let prefix = |m: &Value| -> Vec<Value> {
        m.as_array().unwrap().iter().filter(|e| e["d"][0].as_u64().unwrap() <= 3).cloned().collect()
    };
    assert!(!lo["matrices"][0].as_array().unwrap().is_empty());
    assert_eq!(prefix(&hi["matrices"][0]), prefix(&lo["matrices"][0]));
    assert_eq!(lo["matrices"][0].as_array().unwrap().len(), prefix(&lo["matrices"][0]).len());
}

#[test]
fn csv_and_text_tables() {
    let out = gmt(&["products", "builtin:P2", "--q-order", "2", "--t-order", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["object", "index", "t", "q", "row", "col", "value"]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    // p ∗ p² = Q·1 in the small product
    assert!(rows.iter().any(|r| r == &csv::StringRecord::from(vec!["product", "1", "1", "Q", "0", "2", "1"])));
    // the point-class deformation: p ∗ p = p² + t²·Q·p + …
    assert!(rows.iter().any(|r| &r[0] == "product" && &r[1] == "1" && &r[2] == "t2" && &r[3] == "Q"));

    let out = gmt(&["connection", "builtin:P2", "--q-order", "1", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("object"));
    assert!(lines.iter().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["A", "0", "Q", "0", "2", "1"]));
}

#[test]
fn ifunction_wire_format() {
    // I = Σ_d Q^d / ∏_{ν=1}^{d} (p + νħ)², expanded with p² = 0
    let out = gmt(&["ifunction", "builtin:P1", "--q-order", "2"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let term = |h: i32, num: &str, den: &str| format!(r#"[{{"den":"{den}","h":{h},"lam":0,"num":"{num}"}}]"#);
    let expected = format!(
        r#"[{{"d":[0],"value":[{},[]]}},{{"d":[1],"value":[{},{}]}},{{"d":[2],"value":[{},{}]}}]"#,
        term(0, "1", "1"),
        term(-2, "1", "1"),
        term(-3, "-2", "1"),
        term(-4, "1", "4"),
        term(-5, "-3", "4"),
    );
    assert_eq!(v["series"].to_string(), expected);
    assert_eq!(v["truncation"].to_string(), r#"{"order":2,"weights":[1]}"#);
}
