//! End-to-end runs of the `mixid` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

use mixid_core::io::{matrix_from_json, vector_to_json, ConstantTable, MatrixFile, TupleFile, VectorsFile};
use mixid_core::linalg::{field_make, Matrix};
use mixid_core::witness::random_instance;
use mixid_core::words::{self, dsl, Word};
use mixid_core::LinearGroup;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", self.stdout))
    }
}

fn mixid(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_mixid"))
        .args(args)
        .env_remove("MIXID_WORKERS")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn put(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn put_json<T: serde::Serialize>(dir: &TempDir, name: &str, value: &T) -> PathBuf {
    put(dir, name, &serde_json::to_string(value).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Word file plus constants file for an arbitrary word.
fn write_word(dir: &TempDir, w: &Word) -> (PathBuf, PathBuf) {
    let (text, table) = dsl::to_text(w);
    (put(dir, "word.txt", &text), put_json(dir, "constants.json", &table.to_file()))
}

#[test]
fn norm_of_identity_is_zero() {
    let dir = TempDir::new().unwrap();
    let f = field_make(3, 1).unwrap();
    let m = put_json(&dir, "m.json", &MatrixFile::from_matrix(&Matrix::identity(&f, 4)));
    let run = mixid(&["norm", "--matrix", s(&m)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.json()["projective_norm"], 0);

    let swap = Matrix::from_ints(&f, &[&[0, 1], &[1, 0]]);
    let m = put_json(&dir, "swap.json", &MatrixFile::from_matrix(&swap));
    assert_eq!(mixid(&["norm", "--matrix", s(&m)]).json()["projective_norm"], 1);
}

#[test]
fn eval_rejects_tuple_over_other_field() {
    let dir = TempDir::new().unwrap();
    let f2 = field_make(2, 1).unwrap();
    let f3 = field_make(3, 1).unwrap();
    let mut table = ConstantTable::empty(&f2, 2);
    table.insert("c", Matrix::from_ints(&f2, &[&[0, 1], &[1, 0]]));
    let consts = put_json(&dir, "c.json", &table.to_file());
    let word = put(&dir, "w.txt", "c*x1*c*x1^-1");
    let tuple = TupleFile {
        field: mixid_core::io::FieldSpecJson::of(&f3),
        n: 2,
        matrices: vec![mixid_core::io::matrix_to_json(&Matrix::identity(&f3, 2))],
    };
    let tuple = put_json(&dir, "t.json", &tuple);
    let run = mixid(&["eval", "--word", s(&word), "--constants", s(&consts), "--tuple", s(&tuple)]);
    assert_eq!(run.code, 1);
    assert_eq!(run.json()["error"]["kind"], "ValidationError");
}

#[test]
fn eval_output_reparses_to_library_value() {
    let dir = TempDir::new().unwrap();
    let f = field_make(2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let inst = random_instance(&f, 3, 4, 2, LinearGroup::Gl, &mut rng).unwrap();
    let (word, consts) = write_word(&dir, &inst.word);
    let hs: Vec<Matrix> = (0..2).map(|_| Matrix::random_invertible(&f, 3, &mut rng)).collect();
    let tuple = TupleFile {
        field: mixid_core::io::FieldSpecJson::of(&f),
        n: 3,
        matrices: hs.iter().map(mixid_core::io::matrix_to_json).collect(),
    };
    let tuple = put_json(&dir, "t.json", &tuple);
    let run = mixid(&["eval", "--word", s(&word), "--constants", s(&consts), "--tuple", s(&tuple)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let value: mixid_core::io::MatrixJson = serde_json::from_value(run.json()["value"].clone()).unwrap();
    let got = matrix_from_json(&f, 3, &value).unwrap();
    assert_eq!(got, words::evaluate(&inst.word, &hs).unwrap());
}

#[test]
fn reduce_output_reparses_to_library_value() {
    let dir = TempDir::new().unwrap();
    let f = field_make(3, 1).unwrap();
    let mut table = ConstantTable::empty(&f, 2);
    table.insert("a", Matrix::from_ints(&f, &[&[1, 1], &[0, 1]]));
    table.insert("z", Matrix::from_ints(&f, &[&[2, 0], &[0, 2]]));
    let consts = put_json(&dir, "c.json", &table.to_file());
    let word = put(&dir, "w.txt", "a*x1*z*x1^-1*x2*a");
    let run = mixid(&["reduce", "--word", s(&word), "--constants", s(&consts)]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let v = run.json();
    assert_eq!(v["input_length"], 3);
    assert_eq!(v["length"], 1);
    assert_eq!(v["changed"], true);

    let out_table: mixid_core::io::ConstantsFile = serde_json::from_value(serde_json::json!({
        "field": {"p": 3, "e": 1},
        "n": 2,
        "constants": v["reduced"]["constants"],
    }))
    .unwrap();
    let text = v["reduced"]["text"].as_str().unwrap();
    let reparsed = dsl::parse_word(text, &out_table.to_table().unwrap(), Some(2)).unwrap();
    let original = dsl::parse_word("a*x1*z*x1^-1*x2*a", &table, None).unwrap();
    assert_eq!(reparsed, words::reduce(&original));
}

#[test]
fn classify_and_crit_length() {
    let dir = TempDir::new().unwrap();
    let f = field_make(2, 1).unwrap();
    let mut table = ConstantTable::empty(&f, 2);
    table.insert("t", Matrix::from_ints(&f, &[&[0, 1], &[1, 0]]));
    let consts = put_json(&dir, "c.json", &table.to_file());
    let word = put(&dir, "w.txt", "x1*t*x1^-1*x2");
    let run = mixid(&["classify", "--word", s(&word), "--constants", s(&consts)]);
    let v = run.json();
    assert_eq!(v["classification"]["jminus"], serde_json::json!([1]));
    assert_eq!(v["classification"]["j0"], serde_json::json!([2]));
    assert_eq!(v["reduced"], true);
    let run = mixid(&["crit-length", "--word", s(&word), "--constants", s(&consts)]);
    assert_eq!(run.json()["critical_length"], 1);
}

#[test]
fn witness_is_verified_and_reparses() {
    let dir = TempDir::new().unwrap();
    let f = field_make(3, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = random_instance(&f, 8, 3, 2, LinearGroup::Gl, &mut rng).unwrap();
    assert!(!inst.sources.is_empty());
    let (word, consts) = write_word(&dir, &inst.word);
    let vectors = VectorsFile {
        field: mixid_core::io::FieldSpecJson::of(&f),
        n: 8,
        sources: inst.sources.iter().map(|v| vector_to_json(&f, v)).collect(),
        targets: inst.targets.iter().map(|v| vector_to_json(&f, v)).collect(),
    };
    let vectors = put_json(&dir, "v.json", &vectors);
    let args = ["witness", "--word", s(&word), "--constants", s(&consts), "--vectors", s(&vectors), "--seed", "9"];
    let run = mixid(&args);
    assert_eq!(run.code, 0, "{}", run.stdout);
    let v = run.json();
    assert_eq!(v["verified"], true);
    let hs: Vec<Matrix> = v["h"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| matrix_from_json(&f, 8, &serde_json::from_value(m.clone()).unwrap()).unwrap())
        .collect();
    let value = words::evaluate(&inst.word, &hs).unwrap();
    for (u, t) in inst.sources.iter().zip(&inst.targets) {
        assert_eq!(&value.apply(u), t);
    }
    assert_eq!(mixid(&args).stdout, run.stdout);
}

#[test]
fn randomized_commands_need_a_seed() {
    let dir = TempDir::new().unwrap();
    let word = put(&dir, "w.txt", "x1*x2");
    let run = mixid(&["diameter", "--word", s(&word), "--p", "2", "--n", "6"]);
    assert_eq!(run.code, 2);
    assert!(run.stderr.contains("--seed"));
    assert_eq!(mixid(&["selftest"]).code, 2);
}

#[test]
fn diameter_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let f = field_make(2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let inst = random_instance(&f, 12, 3, 2, LinearGroup::Gl, &mut rng).unwrap();
    let (word, consts) = write_word(&dir, &inst.word);
    let args = ["diameter", "--word", s(&word), "--constants", s(&consts), "--seed", "3", "--samples", "4"];
    let a = mixid(&args);
    assert_eq!(a.code, 0, "{}", a.stdout);
    let b = mixid(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = a.json();
    assert!(v["realized"].as_u64().unwrap_or(0) >= v["theoretical_floor"].as_u64().unwrap());
}

#[test]
fn check_identity_examples() {
    let dir = TempDir::new().unwrap();
    let word = put(&dir, "w.txt", "x1*x1*x1*x1*x1*x1");
    let base = ["check-identity", "--group", "gl", "--n", "2", "--p", "2"];
    let run = mixid(&[&base[..], &["--word", s(&word)]].concat());
    assert_eq!(run.code, 0, "{}", run.stdout);
    assert_eq!(run.json()["holds"], true);

    let word = put(&dir, "w3.txt", "x1*x1*x1");
    let v = mixid(&[&base[..], &["--word", s(&word)]].concat()).json();
    assert_eq!(v["holds"], false);
    assert!(v["counterexample"].is_array());

    let word = put(&dir, "triv.txt", "x1*x1^-1");
    let run = mixid(&[&base[..], &["--word", s(&word)]].concat());
    assert_eq!(run.code, 1);
    assert_eq!(run.json()["error"]["kind"], "TrivialWord");
}

#[test]
fn search_is_reproducible_and_worker_invariant() {
    let base = ["search-identity", "--group", "gl", "--n", "2", "--p", "2", "--max-length", "4", "--mode", "nonsingular-only"];
    let one = mixid(&base);
    assert_eq!(one.code, 0, "{}", one.stdout);
    let again = mixid(&base);
    assert_eq!(one.stdout, again.stdout);
    let four = mixid(&[&base[..], &["--workers", "4"]].concat());
    assert_eq!(one.stdout, four.stdout);
    let v = one.json();
    assert_eq!(v["minimal_length"], 4);
    assert!(!v["identities"].as_array().unwrap().is_empty());
}

#[test]
fn exhausted_budget_reports_partial_progress() {
    let run = mixid(&["search-identity", "--group", "gl", "--n", "2", "--p", "2", "--max-length", "6", "--budget", "100"]);
    assert_eq!(run.code, 1);
    let v = run.json();
    assert_eq!(v["error"]["kind"], "BudgetExceeded");
    assert_eq!(v["partial_report"]["budget_exhausted"], true);
}

#[test]
fn aq_demo_levels() {
    let dir = TempDir::new().unwrap();
    let word = put(&dir, "w.txt", "x1*x2");
    let run = mixid(&["aq-demo", "--word", s(&word), "--p", "2", "--n", "2", "--levels", "1..3"]);
    assert_eq!(run.code, 0, "{}", run.stdout);
    assert_eq!(run.json()["levels"].as_array().unwrap().len(), 3);
    let run = mixid(&["aq-demo", "--word", s(&word), "--p", "2", "--n", "2", "--levels", "1..2", "--epsilon", "1/4"]);
    assert_eq!(run.code, 2);
    let args = ["aq-demo", "--word", s(&word), "--p", "2", "--n", "2", "--levels", "1..2", "--epsilon", "1/4", "--seed", "1"];
    let run = mixid(&args);
    assert_eq!(run.code, 0, "{}", run.stdout);
    assert_eq!(run.stdout, mixid(&args).stdout);
}

#[test]
fn out_file_and_pretty() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("report.json");
    let run = mixid(&["selftest", "--seed", "2", "--out", s(&out)]);
    assert_eq!(run.code, 0, "{}", run.stdout);
    assert!(run.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["passed"], true);

    let f = field_make(2, 1).unwrap();
    let m = put_json(&dir, "m.json", &MatrixFile::from_matrix(&Matrix::identity(&f, 2)));
    let run = mixid(&["norm", "--matrix", s(&m), "--pretty"]);
    assert!(run.stdout.lines().any(|l| l.starts_with("projective_norm") && l.trim_end().ends_with('0')));
}

#[test]
fn parse_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let word = put(&dir, "w.txt", "x1*unknown");
    let run = mixid(&["reduce", "--word", s(&word), "--p", "2", "--n", "2"]);
    assert_eq!(run.code, 1);
    assert_eq!(run.json()["error"]["kind"], "ParseError");
    let run = mixid(&["norm", "--matrix", "/nonexistent/m.json"]);
    assert_eq!(run.json()["error"]["kind"], "ParseError");
}
