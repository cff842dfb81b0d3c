use std::path::PathBuf;
use std::process::{Command, Output};

use lietor::graded::QuantumMatrix;
use lietor::scalar::Field;
use serde_json::Value;

fn lietor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lietor")).args(args).env_remove("LIETOR_MAX_WINDOW").output().unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lietor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn zeta3_file() -> PathBuf {
    let f = Field::cyclotomic(3);
    let q = QuantumMatrix::from_upper(f, 2, &[(0, 1, f.zeta_pow(1))]).unwrap();
    scratch("zeta3.json", &q.to_json().to_string())
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn malformed_json_is_a_usage_error() {
    let p = scratch("broken.json", "{\"q\": [[1, ");
    let o = lietor(&["qtorus", "centre", "--q", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed JSON"));
}

#[test]
fn missing_subcommand_is_a_usage_error() {
    assert_eq!(lietor(&["roots"]).status.code(), Some(2));
    assert_eq!(lietor(&["eala", "build", "--coord", "laurent", "--tau", "bogus"]).status.code(), Some(2));
}

#[test]
fn qtorus_centre_of_cube_root_of_unity() {
    let q = zeta3_file();
    let out = std::env::temp_dir().join(format!("lietor-cli-{}/centre.json", std::process::id()));
    let o = lietor(&["qtorus", "centre", "--q", q.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["ok"], Value::Bool(true));
    assert_eq!(report["module"], "graded-algebras");
    assert_eq!(report["data"]["gamma"], serde_json::json!([[3, 0], [0, 3]]));
    assert_eq!(report["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn ars_build_labels() {
    let o = lietor(&["ars", "build", "--type", "B", "--rank", "3", "--tier", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("B3^(2)") && s.contains("D4^(2)"), "{s}");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let q = zeta3_file();
    let args = ["qtorus", "decompose", "--q", q.to_str().unwrap(), "--window", "2"];
    let (a, b) = (lietor(&args), lietor(&args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(lietor(&["table", "affine"]).stdout, lietor(&["table", "affine"]).stdout);
}

#[test]
fn max_window_caps_and_validates() {
    let q = zeta3_file();
    let args = ["qtorus", "centre", "--q", q.to_str().unwrap(), "--window", "6"];
    let capped = Command::new(env!("CARGO_BIN_EXE_lietor")).args(args).env("LIETOR_MAX_WINDOW", "2").output().unwrap();
    assert_eq!(capped.status.code(), Some(0));
    assert!(stdout(&capped).contains("LIETOR_MAX_WINDOW = 2"), "{}", stdout(&capped));
    let bad = Command::new(env!("CARGO_BIN_EXE_lietor")).args(args).env("LIETOR_MAX_WINDOW", "lots").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
