use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cubicgit"));
    for (k, _) in std::env::vars() {
        if k.starts_with("CUBICGIT_") {
            c.env_remove(k);
        }
    }
    c.arg("--quiet");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn document(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "data", "documents", name].iter().collect();
    p.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn validator() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

fn json_output(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let errors: Vec<String> = validator().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?} does not match the schema: {errors:?}");
    v
}

#[test]
fn simplex_counts_monomials() {
    let v = json_output(&["simplex"]);
    assert_eq!(v["count"], 84);
    assert_eq!(v["monomials"][0]["monomial"], "x0^3");
    assert_eq!(json_output(&["simplex", "--n", "2"])["count"], 10);
}

#[test]
fn classify_bundled_documents() {
    let v = json_output(&["classify", &document("fermat.json")]);
    assert_eq!(v["class"], "stable");
    assert!(v["containing"].as_array().unwrap().is_empty());

    let v = json_output(&["classify", &document("f1_support.json")]);
    assert_eq!(v["class"], "strictly-not-stable");
    assert!(v["witness"].is_array());
    assert_eq!(v["containing"][0]["family"], 1);

    let v = json_output(&["classify", &document("r23_support.json")]);
    assert_eq!(v["class"], "unstable");
    assert_eq!(v["containing"][0]["family"], 23);
}

#[test]
fn classify_text_output() {
    let o = run(&["classify", &document("fermat.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("class: stable\n"));
}

#[test]
fn classify_small_context_enumerates_an_atlas() {
    let dir = tempdir();
    let p = dir.join("n2.json");
    std::fs::write(&p, r#"{"n": 2, "d": 3, "terms": [{"exp": [3, 0, 0], "coeff": "1"}, {"exp": [2, 1, 0], "coeff": "-2/3"}]}"#)
        .unwrap();
    let v = json_output(&["classify", p.to_str().unwrap()]);
    assert_eq!(v["atlas"], "enumerated");
    assert_eq!(v["class"], "unstable");
}

fn tempdir() -> PathBuf {
    let p = std::env::temp_dir().join(format!("cubicgit-cli-{}-{:?}", std::process::id(), std::thread::current().id()));
    std::fs::create_dir_all(&p).unwrap();
    p
}

#[test]
fn bad_documents_exit_2_with_code() {
    let dir = tempdir();
    let p = dir.join("bad.json");
    std::fs::write(&p, r#"{"n": 6, "d": 3, "terms": [{"exp": [2, 0, 0, 0, 0, 0, 0], "coeff": "1"}]}"#).unwrap();
    let o = run(&["classify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("weight-mismatch"));

    let o = run(&["classify", dir.join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["classify", "--n", "5", &document("fermat.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["simplex", "--field", "prime:x"]).status.code(), Some(2));
    assert_eq!(run(&["singular", "--family", "40"]).status.code(), Some(2));
    assert_eq!(run(&["reproduce", "--n", "5"]).status.code(), Some(2));
    assert_eq!(run(&["reproduce", "everything"]).status.code(), Some(2));
}

#[test]
fn resource_budget_exits_3() {
    let o = run(&["singular", "--family", "22", "--field", "rational", "--seeds", "1", "--max-pairs", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource-exhausted"));
}

#[test]
fn singular_rows_match_table() {
    let v = json_output(&["singular", "--family", "1,4"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0]["dimension"].as_i64(), rows[0]["degree"].as_u64()), (Some(1), Some(2)));
    assert_eq!((rows[1]["dimension"].as_i64(), rows[1]["degree"].as_u64()), (Some(1), Some(8)));
    assert!(v["diffs"].as_array().unwrap().is_empty());
}

#[test]
fn singular_of_a_document() {
    let v = json_output(&["singular", "--input", &document("fermat.json")]);
    assert_eq!(v["dimension"], -1);
    let v = json_output(&["singular", "--input", &document("f1_support.json")]);
    // All coefficients 1 is not a generic member, but the scheme is still
    // computed exactly.
    assert!(v["dimension"].as_i64().unwrap() >= 0);
}

#[test]
fn inclusions_and_reproduce_are_clean() {
    let v = json_output(&["inclusions"]);
    assert!(v["diffs"].as_array().unwrap().is_empty());
    assert_eq!(v["screen"]["pairs_checked"], 342);
    assert_eq!(v["negative_control"]["verified"], false);

    let a = run(&["--json", "reproduce", "inclusions"]);
    let b = run(&["--json", "reproduce", "inclusions"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(validator().is_valid(&v));
    assert_eq!(v["clean"], true);
}

#[test]
fn failing_chain_file_exits_1() {
    let dir = tempdir();
    let p = dir.join("chains.json");
    let chains = r#"{"chains": [
        {"id": 1, "source": 22, "target": 5, "steps": [{"kind": "absorb-cofactor", "monomial": "x0*x6", "into": 1}]}
    ]}"#;
    std::fs::write(&p, chains).unwrap();
    let o = run(&["--json", "inclusions", "--chains", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(validator().is_valid(&v));
    assert_eq!(v["chains"][0]["verified"], false);
    assert_eq!(v["diffs"].as_array().unwrap().len(), 1);
}

#[test]
fn env_vars_mirror_flags() {
    let o = bin().env("CUBICGIT_N", "2").env("CUBICGIT_JSON", "true").arg("simplex").output().unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 10);
    // The flag wins over the environment.
    let o = bin().env("CUBICGIT_N", "2").args(["--n", "3", "--json", "simplex"]).output().unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["count"], 20);
}

#[test]
fn out_flag_and_table_formats() {
    let dir = tempdir();
    let out = dir.join("simplex.csv");
    let o = run(&["--n", "1", "--format", "csv", "--out", out.to_str().unwrap(), "simplex"]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv, "index,exponent,monomial\n0,\"[3, 0]\",x0^3\n1,\"[2, 1]\",x0^2*x1\n2,\"[1, 2]\",x0*x1^2\n3,\"[0, 3]\",x1^3\n");

    let md = stdout(&run(&["--n", "2", "--format", "markdown", "enumerate"]));
    assert!(md.contains("| index | id | vector | support_size | eta | support |"));
    assert!(md.contains("| 1 |  | (2,-1,-1) | 6 | boundary |"));

    let o = run(&["--out", dir.join("no/such/dir/x").to_str().unwrap(), "simplex"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_small_contexts() {
    let v = json_output(&["enumerate", "--n", "3"]);
    let fams = v["families"].as_array().unwrap();
    assert!(!fams.is_empty());
    assert!(fams.iter().all(|f| f["id"].is_null()));
}
