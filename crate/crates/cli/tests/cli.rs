use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockortho"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).expect("stderr is JSON")
}

fn coeffs(v: &Value) -> Vec<String> {
    v["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_string())
        .collect()
}

/// `mu_n` of `exp(-x^2)`, normalized, as `n,mu_n` rows; `bump` adds `1/64`
/// multiples to the given moment.
fn hermite_csv(max: usize, bump: Option<(usize, i64)>) -> String {
    let mut s = String::from("n,mu_n\n");
    let mut num: i64 = 1;
    for n in 0..=max {
        let (p, d) = if n % 2 == 1 {
            (0, 1)
        } else {
            if n >= 2 {
                num *= n as i64 - 1;
            }
            (num, 1i64 << (n / 2))
        };
        let (p, d) = match bump {
            Some((k, extra)) if k == n => (p * (64 / d) + extra, 64),
            _ => (p, d),
        };
        s.push_str(&format!("{n},{p}/{d}\n"));
    }
    s
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn hermite_table_block() {
    let o = run(&["table", "--pair", "hermite", "--N", "5", "--i", "2"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    let block = &v["blocks"][0];
    assert_eq!(block["i"], 2);
    assert_eq!(coeffs(&block["polys"]["P_2_2"]), ["-1/2", "0", "1"]);
    assert_eq!(coeffs(&block["polys"]["P_2_4"]), ["1/8", "0", "-7/4", "0", "1"]);
    assert_eq!(v["normalization"], "monic");
}

#[test]
fn laguerre_csv_rows() {
    let o = run(&["table", "--pair", "laguerre", "--z", "1", "--N", "3", "--i", "1", "--csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,n,H,c0,c1,c2"));
    assert_eq!(lines.next(), Some("1,1,1/2,-1,1,0"));
    assert_eq!(lines.next(), Some("1,2,3/8,1/2,-5/2,1"));
}

#[test]
fn block_zero_is_the_second_measures_standard_basis() {
    let o = run(&["table", "--pair", "hermite", "--N", "4", "--i", "0"]);
    let v = stdout_json(&o);
    let p = &v["blocks"][0]["polys"];
    assert_eq!(coeffs(&p["P_0_2"]), ["-1/4", "0", "1"]);
    assert_eq!(coeffs(&p["P_0_3"]), ["0", "-3/4", "0", "1"]);
}

#[test]
fn table_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let p = path.display().to_string();
    let o = run(&["table", "--pair", "hermite", "--N", "4", "--output", &p]);
    assert!(o.status.success());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written["blocks"].as_array().unwrap().len(), 4);
    assert_eq!(stdout_json(&o)["written"], p.as_str());
}

#[test]
fn exact_output_is_byte_identical_across_runs() {
    for args in [
        &["table", "--pair", "laguerre", "--z", "3/2", "--N", "6"][..],
        &["verify", "--pair", "hermite", "--N", "6"][..],
        &["projector", "--pair", "laguerre", "--N", "5", "--i", "2"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn verify_passes_on_presets() {
    for args in [
        &["verify", "--pair", "hermite", "--N", "8"][..],
        &["verify", "--pair", "laguerre", "--z", "1/3", "--N", "7"][..],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let v = stdout_json(&o);
        assert_eq!(v["pass"], true);
        assert!(v["failed"].as_array().unwrap().is_empty());
    }
}

#[test]
fn tabulated_moments_reproduce_the_preset() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.csv", &hermite_csv(14, None));
    let from_file = run(&["table", "--pair", "hermite", "--moments-file", &good, "--N", "8", "--i", "3"]);
    let preset = run(&["table", "--pair", "hermite", "--N", "8", "--i", "3"]);
    assert!(from_file.status.success());
    assert_eq!(stdout_json(&from_file)["blocks"], stdout_json(&preset)["blocks"]);
}

#[test]
fn corrupted_moments_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.csv", &hermite_csv(14, Some((12, 64))));
    let o = run(&["verify", "--pair", "hermite", "--moments-file", &bad, "--N", "8"]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert_eq!(v["pass"], false);
    let failed: Vec<&str> = v["failed"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert!(failed.iter().any(|f| f.starts_with("constraint_orthogonality")), "{failed:?}");
    let e = stderr_json(&o);
    assert!(e["error"]["message"].as_str().unwrap().contains("constraint_orthogonality"));
}

#[test]
fn float_verify_beyond_the_guard_skips() {
    let o = run(&["verify", "--pair", "hermite", "--N", "25", "--float", "--no-integrals", "--no-zeros"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let skipped = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "skipped")
        .count();
    assert!(skipped > 0);
}

#[test]
fn float_table_beyond_the_guard_is_a_conditioning_error() {
    let o = run(&["table", "--pair", "hermite", "--N", "25", "--float"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr_json(&o)["error"]["kind"].is_string());
}

#[test]
fn roots_report_the_guaranteed_sign_changes() {
    let o = run(&["roots", "--pair", "laguerre", "--N", "6", "--i", "3"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);
}

#[test]
fn projector_routes_agree() {
    let o = run(&["projector", "--pair", "hermite", "--N", "6", "--i", "3"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["routes_agree"], true);
    assert_eq!(v["idempotent"], true);
    assert_eq!(v["complementary"], true);
}

#[test]
fn three_subspace_cases() {
    let unique = stdout_json(&run(&["three-subspace", "--z12", "1", "--z23", "2", "--z13", "3"]));
    assert_eq!(unique["classification"], "Unique");
    assert_eq!(unique["ranks"], serde_json::json!([2, 2]));

    let none = stdout_json(&run(&["three-subspace", "--z12", "1", "--z23", "2", "--z13", "4"]));
    assert_eq!(none["classification"], "NoSolution");
    assert_eq!(none["ranks"], serde_json::json!([1, 2]));

    let family = stdout_json(&run(&["three-subspace", "--symmetric12", "--z23", "2", "--z13", "3"]));
    assert_eq!(family["classification"], "Family(1)");
    assert_eq!(coeffs(&family["family"]["particular"][0]), ["-12", "0", "1"]);
    assert_eq!(coeffs(&family["family"]["kernel"][0]), ["-3", "1"]);
}

#[test]
fn moments_command_lists_both_measures() {
    let v = stdout_json(&run(&["moments", "--pair", "laguerre", "--z", "2", "--order", "3"]));
    let first = &v["measures"][0]["moments"];
    assert!(first.to_string().contains("\"6\""), "{first}");
    assert_eq!(v["measures"].as_array().unwrap().len(), 2);
}

#[test]
fn usage_errors_exit_two_with_json() {
    for args in [
        &["table", "--N", "4"][..],
        &["table", "--pair", "hermite", "--N", "4", "--i", "9"][..],
        &["table", "--pair", "laguerre", "--z", "-1", "--N", "4"][..],
        &["table", "--pair", "hermite", "--N", "4", "--exact", "--float"][..],
        &["table", "--pair", "hermite", "--N", "4", "--normalization", "weird"][..],
        &["three-subspace", "--z23", "2", "--z13", "3"][..],
        &["nonsense"][..],
    ] {
        let o = run(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let e = stderr_json(&o);
        assert!(e["error"]["kind"].is_string(), "{args:?}");
        assert!(!e["error"]["message"].as_str().unwrap().is_empty(), "{args:?}");
    }
}

#[test]
fn missing_moment_file_is_reported() {
    let o = run(&["table", "--moments-file", "/nonexistent/mu.csv", "--pair", "hermite", "--N", "3"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr_json(&o)["error"]["message"].is_string());
}
