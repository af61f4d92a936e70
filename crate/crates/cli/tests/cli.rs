use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kannappan_core::corpus;
use kannappan_core::DomainKind;
use serde_json::Value;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus_file(name: &str) -> String {
    root().join("corpus").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kannappan"))
        .args(args)
        .output()
        .expect("run kannappan")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn assert_schema(schema: &str, doc: &Value) {
    let path = root().join("schemas").join(format!("{schema}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft202012)
        .compile(&schema)
        .unwrap();
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:#?}");
}

fn write_pair(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn families(v: &Value) -> Vec<String> {
    v["families"].as_array().unwrap().iter().map(|f| f.as_str().unwrap().to_string()).collect()
}

#[test]
fn corpus_files_match_the_library() {
    for (name, d) in corpus::corpus() {
        let text = std::fs::read_to_string(corpus_file(&format!("{name}.cayley"))).unwrap();
        let DomainKind::FiniteTable { n, table } = d.kind() else { unreachable!() };
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), n.to_string(), "{name}");
        for row in table.chunks(*n) {
            let expected: Vec<String> = row.iter().map(usize::to_string).collect();
            assert_eq!(lines.next().unwrap(), expected.join(" "), "{name}");
        }
    }
    let (code, text_json) = json(&["characters", &corpus_file("e-a-0.cayley")]);
    let (_, json_json) = json(&["characters", &corpus_file("e-a-0.json")]);
    assert_eq!(code, 0);
    assert_eq!(text_json, json_json);
}

#[test]
fn characters_examples() {
    let (_, v) = json(&["characters", &corpus_file("z2.cayley")]);
    let chars = v["characters"].as_array().unwrap();
    assert_eq!(chars.len(), 2);
    assert!(chars.iter().all(|c| c["p_set"].as_array().unwrap().is_empty()));
    assert_schema("characters", &v);

    let (_, v) = json(&["characters", &corpus_file("e-a-0.cayley")]);
    let chars = v["characters"].as_array().unwrap();
    assert_eq!(chars.len(), 2);
    let with_p: Vec<&Value> = chars.iter().filter(|c| !c["p_set"].as_array().unwrap().is_empty()).collect();
    assert_eq!(with_p.len(), 1);
    assert_eq!(with_p[0]["p_set"], serde_json::json!(["a"]));
    assert_eq!(with_p[0]["rho_basis"].as_array().unwrap().len(), 1);
    assert_schema("characters", &v);

    let (_, v) = json(&["characters", &corpus_file("leftzero2.cayley")]);
    assert_eq!(v["characters"].as_array().unwrap().len(), 1);

    let (code, v) = json(&["characters", "--backend", "naturals-window", "--window", "10"]);
    assert_eq!(code, 0);
    assert_eq!(v["additive_basis"].as_array().unwrap().len(), 1);
    assert_schema("characters", &v);
}

#[test]
fn solve_examples() {
    let (code, v) = json(&["solve", &corpus_file("null2.cayley"), "--z0", "0"]);
    assert_eq!(code, 0);
    let fams = families(&v);
    assert!(fams.starts_with(&["F1".into(), "F2".into()]), "{fams:?}");
    assert!(v["solutions"].as_array().unwrap().iter().all(|s| s["residual"] == 0.0));
    assert_schema("solve", &v);

    let (_, v) = json(&["solve", &corpus_file("z2.cayley"), "--z0", "0"]);
    let sols = v["solutions"].as_array().unwrap();
    let f3_chars: std::collections::BTreeSet<String> = sols
        .iter()
        .filter(|s| s["family"] == "F3")
        .map(|s| s["spec"]["chi"].to_string())
        .collect();
    assert_eq!(f3_chars.len(), 2);
    for f in ["F1", "F3", "F4"] {
        assert!(families(&v).contains(&f.to_string()));
    }
    assert_schema("solve", &v);

    let (_, v) = json(&["solve", &corpus_file("trivial.cayley"), "--grid", "d=0,2"]);
    assert_eq!(families(&v), ["F1", "F3"]);
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.iter().filter(|s| s["family"] == "F3").count(), 2);
    // d = 2 gives f = d/(1-d²) = -2/3, g = 1/(1-d²) = -1/3
    assert_eq!(sols[2]["f"][0], serde_json::json!({"L": 1, "coeffs": [[-2, 3]]}));
    assert_eq!(sols[2]["g"][0], serde_json::json!({"L": 1, "coeffs": [[-1, 3]]}));
}

#[test]
fn classify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let z2 = corpus_file("z2.cayley");
    let f4 = write_pair(dir.path(), "f4.json", r#"{"f": [0, "i"], "g": [1, 0]}"#);
    let (code, v) = json(&["classify", &z2, "--pair", &f4]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["family"], "F4");
    let c = &v["result"]["report"]["matches"][0]["spec"]["c"];
    assert!((c["re"].as_f64().unwrap().abs() - 1.0).abs() < 1e-12 && c["im"].as_f64().unwrap().abs() < 1e-12);
    assert_schema("classify", &v);

    let zero = write_pair(dir.path(), "zero.json", r#"{"f": [0, 0], "g": [0, 0]}"#);
    let (code, v) = json(&["classify", &z2, "--pair", &zero]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["family"], "F1");

    let bad = write_pair(dir.path(), "bad.json", r#"{"f": [0, "i"], "g": [1.001, 0]}"#);
    let (code, v) = json(&["classify", &z2, "--pair", &bad]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["status"], "residual_too_large");
    assert_eq!(v["result"]["x"], "0");
    assert_schema("classify", &v);

    // a family-8 pair with A ≠ 0 lives on the window
    // χ = 1, A(x) = x, z0 = 1: f = A(z0)χ + Ψ = x + 1, g = χ(z0)χ + f
    let f: Vec<i64> = (1..=8).map(|x| x + 1).collect();
    let g: Vec<i64> = f.iter().map(|v| 1 + v).collect();
    let body = serde_json::json!({"f": f, "g": g}).to_string();
    let p = write_pair(dir.path(), "f8.json", &body);
    let (code, v) = json(&["classify", "--backend", "naturals-window", "--window", "8", "--z0", "1", "--pair", &p]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["result"]["family"], "F8");
    assert_schema("classify", &v);
}

#[test]
fn verify_theorem_examples() {
    for (file, extra) in [
        ("trivial.cayley", vec!["--starts", "200", "--seed", "7"]),
        ("z2.cayley", vec!["--starts", "800", "--seed", "7"]),
        ("null2.cayley", vec![]),
    ] {
        let mut args = vec!["verify-theorem"];
        let path = corpus_file(file);
        args.push(&path);
        args.extend(extra);
        let (code, v) = json(&args);
        assert_eq!(code, 0, "{file}");
        assert_eq!(v["coverage"]["unclassified"], 0);
        assert!(v["coverage"]["verdict"].as_str().unwrap().starts_with("no counterexample found among"));
        assert_schema("verify-theorem", &v);
    }
}

#[test]
fn coverage_failure_exits_two() {
    // non-reduced components on this domain leave some roots outside the fit gate
    let (code, v) = json(&["verify-theorem", &corpus_file("e-a-0.cayley"), "--z0", "1", "--starts", "300"]);
    assert_eq!(code, 2);
    assert!(v["coverage"]["unclassified"].as_u64().unwrap() > 0);
    assert_schema("verify-theorem", &v);
}

#[test]
fn commands_are_deterministic() {
    let z3 = corpus_file("z3.cayley");
    for args in [
        vec!["characters", z3.as_str()],
        vec!["solve", z3.as_str()],
        vec!["verify-theorem", z3.as_str(), "--starts", "300", "--seed", "3"],
    ] {
        let a = run(&[args.as_slice(), &["--format", "json"]].concat());
        let b = run(&[args.as_slice(), &["--format", "json"]].concat());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let c = run(&args);
        let d = run(&args);
        assert_eq!(c.stdout, d.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let out = run(&[
        "solve",
        &corpus_file("trivial.cayley"),
        "--format",
        "json",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["command"], "solve");
}

#[test]
fn usage_and_input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.cayley");
    std::fs::write(&broken, "2\n0 1\n1 9\n").unwrap();
    let out = run(&["characters", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("broken.cayley:3:"), "{err}");

    let nonassoc = dir.path().join("nonassoc.cayley");
    std::fs::write(&nonassoc, "2\n0 1\n0 0\n").unwrap();
    let out = run(&["characters", nonassoc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("associativity"));

    for args in [
        vec!["characters", "/nonexistent/table.cayley"],
        vec!["solve"],
        vec!["solve", "--bogus"],
        vec!["verify-theorem", "--backend", "naturals-window", "--window", "4"],
        vec!["characters", "--backend", "naturals-window"],
        vec!["solve", &corpus_file("z2.cayley"), "--grid", "d=zz"],
        vec!["solve", &corpus_file("z2.cayley"), "--z0", "5"],
        vec!["verify-theorem", &corpus_file("z2.cayley"), "--tolerance", "0"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}
