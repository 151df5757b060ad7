use std::process::{Command, Output};

use serde_json::Value;

fn kdvbh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kdvbh")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn verify_default_passes_all_suites() {
    let out = kdvbh(&["verify", "--windows", "2:1,3:2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    let suites = v["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 7);
    assert!(suites.iter().all(|s| s["status"] == "pass"));
}

#[test]
fn verify_degree_zero() {
    let out = kdvbh(&["verify", "--max-d", "0"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn corrupted_d2_is_named() {
    let out = kdvbh(&["verify", "--corrupt-d2", "--max-d", "3", "--windows", "1:0,2:0"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["failures"].as_array().unwrap().iter().any(|f| f == "D2_squared"));
}

#[test]
fn bh_ladders() {
    let out = kdvbh(&["bh", "--target", "BH_A", "--bidegree", "2,1", "--bidegree", "4,4", "--windows", "2:0,3:0,4:0,5:0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let reports = v["reports"].as_array().unwrap();
    let dims = |r: &Value| r["windows"].as_array().unwrap().iter().map(|w| w["dim"].as_u64().unwrap()).collect::<Vec<_>>();
    assert_eq!((reports[0]["p"].as_u64(), reports[0]["d"].as_u64()), (Some(2), Some(1)));
    assert_eq!(dims(&reports[0]), [3, 4, 5, 6]);
    assert_eq!(reports[0]["stabilization"], "linear-in-N slope 1");
    assert_eq!(dims(&reports[1]), [0, 0, 0, 0]);
    assert_eq!(reports[1]["windows"][0]["N"], 2);
}

#[test]
fn bh_f_exceptional_representatives() {
    let out = kdvbh(&["bh", "--target", "BH_F", "--bidegree", "1,1", "--windows", "2:0,3:0,4:0"]);
    let v = json(&out);
    let checks = v["reports"][0]["oracle_crosschecks"].as_array().unwrap();
    assert_eq!(checks[0]["status"], "pass");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn reports_are_deterministic() {
    let args = ["bh", "--max-d", "3", "--windows", "1:1,2:1,3:1"];
    let a = kdvbh(&args);
    let b = kdvbh(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let keys: Vec<(String, u64, u64)> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["target"].as_str().unwrap().to_string(), r["p"].as_u64().unwrap(), r["d"].as_u64().unwrap()))
        .collect();
    assert_eq!(keys.first().unwrap(), &("H_lambda_A".to_string(), 0, 0));
    assert_eq!(keys.len(), 5 * 12);
}

#[test]
fn pages_of_one_subcomplex() {
    // d − p = −1: the two-term complex in degrees 0 and 1
    let out = kdvbh(&["pages", "--max-d", "3", "--bidegree", "1,0", "--windows", "1:1,2:1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let slices = v["slices"].as_array().unwrap();
    assert!(slices.iter().all(|s| s["k"] == -1));
    assert!(slices.iter().all(|s| s["degrees"].as_array().unwrap().iter().all(|d| d[0].as_i64().unwrap() <= 1)));
}

#[test]
fn pages_cross_checks() {
    let out = kdvbh(&["pages", "--max-d", "4", "--windows", "1:1,2:1,2:2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["oracle_crosschecks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["status"] == "pass"));
    let e2 = &v["windows"][2]["pages"][2]["entries"];
    let at: Vec<(i64, i64)> = e2.as_array().unwrap().iter().map(|e| (e["p"].as_i64().unwrap(), e["q"].as_i64().unwrap())).collect();
    assert_eq!(at, [(0, 0), (1, 2)]);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(kdvbh(&["bh", "--windows", "3:1,2:1"]).status.code(), Some(2));
    assert_eq!(kdvbh(&["bh", "--bidegree", "x"]).status.code(), Some(2));
    assert_eq!(kdvbh(&["bh", "--format", "yaml"]).status.code(), Some(2));
    assert_eq!(kdvbh(&["bh", "--max-d", "2", "--bidegree", "1,3"]).status.code(), Some(2));
    assert_eq!(kdvbh(&["matrix", "--operator", "D3", "--bidegree", "1,1"]).status.code(), Some(2));
}

#[test]
fn matrix_export_and_out_file() {
    let dir = std::env::temp_dir().join(format!("kdvbh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("d1.json");
    let out = kdvbh(&["matrix", "--operator", "D1", "--bidegree", "1,0", "--windows", "1:0,2:0", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let m = &v["matrices"][0];
    assert_eq!(m["domain"].as_array().unwrap().len(), m["cols"].as_u64().unwrap() as usize);
    assert!(m["triplets"].as_str().unwrap().starts_with('#'));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_format() {
    let out = kdvbh(&["bh", "--target", "H_D1_A", "--bidegree", "1,0", "--windows", "2:0,3:0,4:0", "--format", "text"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.starts_with("H_D1_A (1,0): 2:0=1 3:0=1 4:0=1 [constant 1]"), "{s}");
}
