use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_infgroups")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn report_schema_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, stdout, _) = run(&["canonical-form", "--kind", "o", "--seed", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["config"]["command"], "canonical-form");
    assert_eq!(report["config"]["kind"], "O");
    let certs = report["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 3);
    for c in certs {
        assert_eq!(c["verdict"], "pass");
        assert_eq!(c["inputs_digest"].as_str().unwrap().len(), 64);
    }
    assert!(report["artifacts"]["spectrum"].is_array());
}

#[test]
fn rational_relation_inputs_give_exact_zero() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_string()
    };
    let x = write("x.json", r#"{"rows":2,"cols":1,"re":[0.3333333333333333,-2],"im":[0,0],"rational":[[1,3],[-2,1]]}"#);
    let y = write("y.json", r#"{"rows":2,"cols":1,"re":[0,1],"im":[0,0],"rational":[[0,1],[1,1]]}"#);
    let b = write("b.json", r#"{"rows":2,"cols":2,"re":[1,2,0,1],"im":[0,0,0,0],"rational":[[1,1],[2,1],[0,1],[1,1]]}"#);
    let g = write("g.json", r#"{"rows":2,"cols":2,"re":[2,1,1,1],"im":[0,0,0,0],"rational":[[2,1],[1,1],[1,1],[1,1]]}"#);
    let (code, stdout, stderr) = run(&["verify-relations", "--kind", "sp", "--x", &x, "--y", &y, "--b", &b, "--g", &g]);
    assert_eq!(code, 0, "{stderr}");
    let report: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(report["certificates"][0]["residual"], 0.0);
}

#[test]
fn guard_and_usage_errors_exit_two() {
    assert_eq!(run(&["rep-matrix", "--trunc", "1,3"]).0, 2);
    assert_eq!(run(&["rep-matrix", "--degree", "9"]).0, 2);
    assert_eq!(run(&["no-such-command"]).0, 2);
    let (code, _, stderr) = run(&["canonical-form", "--kind", "gl"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("--kind sp"));
}

#[test]
fn known_failing_fourier_case_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    std::fs::write(&a, r#"{"rows":1,"cols":1,"re":[0.5],"im":[0]}"#).unwrap();
    let (code, stdout, _) = run(&["fourier-fixedpoint", "--a", a.to_str().unwrap()]);
    assert_eq!(code, 1);
    let report: Value = serde_json::from_str(&stdout).unwrap();
    let r = report["certificates"][0]["residual"].as_f64().unwrap();
    assert!((r - (2.0 - 2f64.sqrt()).sqrt()).abs() < 1e-9);
}
