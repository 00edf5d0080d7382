use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(name: &str) -> String {
    root().join("corpus").join(name).display().to_string()
}

fn orm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orm")).args(args).output().expect("run orm")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = orm(&full);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (v, out.status.code().unwrap())
}

fn validate(schema: &str, v: &Value) {
    let path = root().join("schemas").join(format!("{schema}.schema.json"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&s).unwrap();
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("{schema}: {msgs:?}");
}

/// Every scalar in the JSON output shows up in the text output.
fn text_matches_json(args: &[&str]) {
    let (v, code) = json(args);
    let text_out = orm(args);
    assert_eq!(text_out.status.code().unwrap(), code);
    let text = String::from_utf8(text_out.stdout).unwrap();
    fn leaves(v: &Value, out: &mut Vec<String>) {
        match v {
            Value::Object(m) => m.values().for_each(|x| leaves(x, out)),
            Value::Array(a) => a.iter().for_each(|x| leaves(x, out)),
            Value::Null => {}
            Value::String(s) => out.push(s.clone()),
            other => out.push(other.to_string()),
        }
    }
    let mut ls = Vec::new();
    leaves(&v, &mut ls);
    for l in ls {
        assert!(text.contains(&l), "{args:?}: `{l}` missing from text output");
    }
}

#[test]
fn analyze_abacab() {
    let (v, code) = json(&["analyze", &corpus("abacab.orm")]);
    assert_eq!(code, 0);
    validate("analyze", &v);
    assert_eq!(v["delta"], serde_json::json!(["ab", "ac"]));
    assert_eq!(v["units_presentation"], "< p,q | pqp = 1 >");
}

#[test]
fn every_corpus_file_analyzes() {
    for f in ["example_1_2.orm", "abacab.orm", "abacab_squared.orm", "aab_acb.orm", "aba.orm", "bicyclic.orm"] {
        let (v, code) = json(&["analyze", &corpus(f)]);
        assert_eq!(code, 0, "{f}");
        validate("analyze", &v);
    }
}

#[test]
fn units_and_reduce() {
    let (v, code) = json(&["units", &corpus("abacab.orm"), "--word", "pqp"]);
    assert_eq!((code, v["value"].as_str()), (0, Some("TRIVIAL")));
    validate("units", &v);
    let (v, _) = json(&["units", &corpus("abacab.orm"), "--word", "abab"]);
    assert_eq!(v["value"], "NONTRIVIAL");
    validate("units", &v);

    let (v, code) = json(&["reduce", &corpus("abacab.orm"), "--word", "abacab"]);
    assert_eq!((code, v["reduced"].as_str()), (0, Some("1")));
    validate("reduce", &v);
}

#[test]
fn ball_inverses_embed() {
    let (v, code) = json(&["ball", &corpus("bicyclic.orm"), "--radius", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["words"], serde_json::json!(["1", "a", "b", "aa", "ba", "bb"]));
    validate("ball", &v);

    let (v, code) = json(&["inverses", &corpus("abacab.orm")]);
    assert_eq!(code, 0);
    assert_eq!(v["weights"], serde_json::json!([1, 1]));
    validate("inverses", &v);

    let (v, code) = json(&["embed", &corpus("abacab.orm"), "--radius", "3"]);
    assert_eq!((code, v["verified"].as_bool()), (0, Some(true)));
    validate("embed", &v);
}

#[test]
fn compile_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let welc = dir.path().join("sys.welc");
    std::fs::write(&welc, "vars: X\ngens: d1 d2\neq: X = d1\nlen: X <= d2\n").unwrap();
    let (v, code) = json(&["compile-welc", &corpus("abacab.orm"), "--system", welc.to_str().unwrap()]);
    assert_eq!(code, 0);
    validate("compile-welc", &v);

    let eqs = dir.path().join("sys.eq");
    let lines: Vec<String> = v["compiled"].as_array().unwrap().iter().map(|l| l.as_str().unwrap().to_string()).collect();
    std::fs::write(&eqs, lines.join("\n")).unwrap();
    let (v, code) = json(&["solve", &corpus("abacab.orm"), "--system", eqs.to_str().unwrap(), "--radius", "5", "--jobs", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v["status"], "SAT");
    assert_eq!(v["witness"]["X"], "babac");
    validate("solve", &v);

    std::fs::write(&eqs, "vars: x\neq: x a = 1\n").unwrap();
    let (v, code) = json(&["solve", &corpus("bicyclic.orm"), "--system", eqs.to_str().unwrap(), "--radius", "4"]);
    assert_eq!((code, v["status"].as_str()), (0, Some("UNSAT_WITHIN_BOUND")));
}

#[test]
fn selftest_passes() {
    let (v, code) = json(&["selftest"]);
    assert_eq!(code, 0, "{v}");
    validate("selftest", &v);
}

#[test]
fn input_errors_exit_one() {
    let out = orm(&["solve", "missing.orm", "--system", "x", "--radius", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[E001]"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.orm");
    std::fs::write(&bad, "< a,b | ab = 1").unwrap();
    let out = orm(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[E002]"));

    let out = orm(&["reduce", &corpus("abacab.orm"), "--word", "xyz"]);
    assert_eq!(out.status.code(), Some(1));

    let out = orm(&["inverses", &corpus("example_1_2.orm")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn undecided_exits_two() {
    // A tiny completion budget and no search leaves the trefoil-like group undecided.
    let out = orm(&[
        "--kb-inferences", "1", "--bfs-nodes", "1", "--bfs-radius", "0",
        "units", &corpus("example_1_2.orm"), "--word", "pqPQ",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("UNKNOWN") || v["value"] == "UNKNOWN", "{text}");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_and_json_agree() {
    text_matches_json(&["analyze", &corpus("aba.orm")]);
    text_matches_json(&["inverses", &corpus("aab_acb.orm")]);
    text_matches_json(&["reduce", &corpus("abacab.orm"), "--word", "bacababacab"]);
    text_matches_json(&["embed", &corpus("abacab.orm"), "--radius", "2"]);
}
