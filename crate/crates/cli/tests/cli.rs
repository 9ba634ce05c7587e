use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orthosym"))
        .args(args)
        .env_remove("ORTHOSYM_EPS")
        .output()
        .expect("binary runs")
}

fn group_file(stem: &str, body: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("{stem}.toml"));
    std::fs::write(&path, body).unwrap();
    path
}

fn classify_json(stem: &str, generators: &[&str]) -> (i32, Value) {
    let list: Vec<String> = generators.iter().map(|g| format!("{g:?}")).collect();
    let path = group_file(stem, &format!("name = {stem:?}\ngenerators = [{}]\n", list.join(", ")));
    let out = run(&["classify", path.to_str().unwrap(), "--json"]);
    let code = out.status.code().unwrap();
    let value = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, value)
}

#[test]
fn classify_examples() {
    let (code, k) = classify_json("k", &["*[i,i][i,1]", "*[k,k][i,1]"]);
    assert_eq!(code, 0);
    assert_eq!(k["case"], "GroupK");
    assert_eq!(k["order"], 16);
    assert_eq!(k["schema"], 1);
    assert_eq!(k["witness"]["kind"], "conjugator");

    let (code, trivial) = classify_json("trivial", &["[1,1]"]);
    assert_eq!(code, 0);
    assert_eq!(trivial["case"], "InvariantLine");
    assert_eq!(trivial["order"], 1);

    let (code, omega) = classify_json("omega", &["[w,1]"]);
    assert_eq!(code, 0);
    assert_eq!(omega["case"], "ChiralElement");
    assert_eq!(omega["chirality"][0]["m"], 3);
}

#[test]
fn classify_json_is_byte_identical_across_runs() {
    let path = group_file("det", "name = \"p2gg\"\ngenerators = [\"[i,i]\", \"*[i,i][i,1]\", \"*[k,k][i,1]\"]\n");
    let a = run(&["classify", path.to_str().unwrap(), "--json"]);
    let b = run(&["classify", path.to_str().unwrap(), "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("timing"));

    let timed = run(&["classify", path.to_str().unwrap(), "--json", "--timing"]);
    assert!(String::from_utf8_lossy(&timed.stdout).contains("timing_ms"));
}

#[test]
fn classify_input_errors_exit_one() {
    let cases = [
        ("bad_syntax", "name = \"x\"\ngenerators = [\"[i,\"]\n"),
        ("not_unit", "name = \"x\"\ngenerators = [\"[(1,1,0,0),1]\"]\n"),
        ("empty", "name = \"x\"\ngenerators = []\n"),
        ("no_name", "generators = [\"[i,1]\"]\n"),
        ("not_toml", "this is not toml"),
        ("infinite", "name = \"x\"\ngenerators = [\"[(0.6,0.8,0,0),1]\"]\nmax_order = 50\n"),
    ];
    for (stem, body) in cases {
        let out = run(&["classify", group_file(stem, body).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{stem}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty(), "{stem}");
    }
    let out = run(&["classify", "/nonexistent/group.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn max_order_flag_overrides_file() {
    let path = group_file("cap", "name = \"K\"\ngenerators = [\"*[i,i][i,1]\", \"*[k,k][i,1]\"]\nmax_order = 4\n");
    assert_eq!(run(&["classify", path.to_str().unwrap()]).status.code(), Some(1));
    assert!(run(&["classify", path.to_str().unwrap(), "--max-order", "16"]).status.success());
}

fn sweep_json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["sweep", "--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    (out.status.code().unwrap(), serde_json::from_slice(&out.stdout).unwrap())
}

#[test]
fn reflection_sweep_has_one_group_k() {
    let (code, v) = sweep_json(&["--family", "torus-reflection-full", "--range", "m=2,n=1..2", "--expect-paper"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    let k: Vec<&str> = rows
        .iter()
        .filter(|r| r["case"] == "GroupK")
        .map(|r| r["spec"].as_str().unwrap())
        .collect();
    assert_eq!(k, ["torus-reflection-full subtype=p2gg m=2 n=2"]);
    // c2mm with m = n = 2 contains a fixed-point-free rotation, unlike the prediction
    assert_eq!(v["summary"]["mismatches"], 1);
    assert_eq!(code, 3);
}

#[test]
fn translation_sweep_reports_mismatches_by_exit_code() {
    let (code, v) = sweep_json(&["--family", "torus-translation", "--range", "m=1..4,n=1..4", "--expect-paper"]);
    let mismatched: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["matches"] == false)
        .map(|r| r["spec"].as_str().unwrap())
        .collect();
    assert_eq!(mismatched, ["torus-translation m=2 n=3 s=0", "torus-translation m=2 n=4 s=0"]);
    assert_eq!(code, 3);

    let (code, v) = sweep_json(&["--family", "torus-translation", "--range", "m=1..4,n=1..4"]);
    assert_eq!(code, 0);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["expected"].is_null()));
}

#[test]
fn lemma_sweep_real_eigenspaces() {
    let (code, v) = sweep_json(&["--family", "lemma-enem", "--params", "m=2..12,n=2..12"]);
    assert_eq!(code, 0);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 121);
    for row in rows {
        let p: Vec<i64> = row["params"].as_array().unwrap().iter().map(|kv| kv[1].as_i64().unwrap()).collect();
        let line = row["case"] == "InvariantLine";
        assert_eq!(line, p[0] == 2 || p[1] == 2, "{}", row["spec"]);
    }
}

#[test]
fn sweep_is_ordered_and_deterministic() {
    let args = ["--family", "torus-flip", "--range", "m=1..6,n=1..6"];
    let a = run(&[&["sweep", "--json"], &args[..]].concat());
    let b = run(&[&["sweep", "--json"], &args[..]].concat());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let params: Vec<Vec<i64>> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["params"].as_array().unwrap().iter().map(|kv| kv[1].as_i64().unwrap()).collect())
        .collect();
    let mut sorted = params.clone();
    sorted.sort();
    assert_eq!(params, sorted);
}

#[test]
fn sweep_input_errors_exit_one() {
    for args in [
        vec!["--family", "nope"],
        vec!["--family", "torus-flip", "--range", "q=1"],
        vec!["--family", "torus-flip", "--range", "m=3..1"],
        vec!["--family", "torus-flip", "--range", "m=x"],
        vec!["--family", "torus-reflection-full", "--range", "m=1"],
    ] {
        let out = run(&[&["sweep"], &args[..]].concat());
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn sweep_text_ends_with_summary() {
    let out = run(&["sweep", "--family", "group-k"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().last().unwrap(),
        "groups 1 | InvariantLine 0 | ChiralElement 0 | GroupK 1 | errors 0 | mismatches 0"
    );
}

#[test]
fn invariant_command() {
    let out = run(&["invariant", "[exppi(2/5), 1]", "--json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v["m"].as_i64(), v["a1"].as_i64(), v["a2"].as_i64()), (Some(5), Some(1), Some(1)));
    assert_eq!(v["isoclinic"], true);
    let expected_class = if v["lk_sign"] == 1 { 1 } else { 4 };
    assert_eq!(v["lk_class"], expected_class);

    assert_eq!(run(&["invariant", "[i,i]"]).status.code(), Some(1));
    assert_eq!(run(&["invariant", "*[w,1]"]).status.code(), Some(1));
    assert_eq!(run(&["invariant", "[w"]).status.code(), Some(1));
}

#[test]
fn verify_paper_single_suite() {
    let out = run(&["verify-paper", "--only", "k-structure"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("PASS k-structure"));

    let out = run(&["verify-paper", "--only", "orbit-permutation", "--json"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[0]["name"], "orbit-permutation");
    assert_eq!(v[0]["passed"], true);

    assert_eq!(run(&["verify-paper", "--only", "nope"]).status.code(), Some(1));
}

#[test]
fn eps_env_var_is_honoured() {
    let path = group_file("eps", "name = \"w\"\ngenerators = [\"[w,1]\"]\n");
    let with_eps = |eps: &str| {
        Command::new(env!("CARGO_BIN_EXE_orthosym"))
            .args(["classify", path.to_str().unwrap()])
            .env("ORTHOSYM_EPS", eps)
            .output()
            .unwrap()
    };
    assert!(with_eps("1e-7").status.success());
    // a tolerance this coarse blurs every eigenvalue test, so no case can be certified
    let out = with_eps("0.5");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trichotomy"));
}
