use std::process::{Command, Output};

use serde_json::Value;

fn permix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permix")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = permix(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    permix(args).status.code().expect("exit code")
}

/// Header and records of a CSV body, skipping a leading `#` comment line.
fn records(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn rate_of_a_reducible_composition() {
    let text = stdout(&["rate", "--m", "2", "--N", "3", "--signature", "+-", "--perm", "1,3,2"]);
    let (h, rows) = records(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][column(&h, "rate")], "1.0");
    assert_eq!(rows[0][column(&h, "status")], "not topologically mixing");
}

#[test]
fn worst_zigzag_matches_its_closed_form() {
    let text = stdout(&[
        "worst", "--m", "3", "--N", "5", "--signature", "+-+", "--mode", "all", "--strategy", "exhaustive",
    ]);
    let (h, rows) = records(&text);
    let value: f64 = rows[0][column(&h, "value")].parse().unwrap();
    let predicted: f64 = rows[0][column(&h, "predicted")].parse().unwrap();
    assert!((value - 0.8726780).abs() < 5e-8);
    assert!((predicted - 0.8726780).abs() < 5e-8);
    assert_eq!(rows[0][column(&h, "evaluated")], "120");
}

#[test]
fn worst_without_a_closed_form_leaves_prediction_empty() {
    let text = stdout(&["worst", "--N", "4", "--signature", "++-"]);
    let (h, rows) = records(&text);
    assert_eq!(rows[0][column(&h, "predicted")], "");
    assert_eq!(rows[0][column(&h, "strategy")], "exhaustive");
    let json: Value = serde_json::from_str(&stdout(&["worst", "--N", "4", "--signature", "++-", "--format", "json"])).unwrap();
    assert!(json["rows"][0]["predicted"].is_null());
}

#[test]
fn default_strategy_samples_beyond_seven_cells() {
    let text = stdout(&["worst", "--N", "8", "--signature", "+-", "--samples", "50"]);
    let (h, rows) = records(&text);
    assert_eq!(rows[0][column(&h, "strategy")], "sampled(50,1)");
    assert_eq!(rows[0][column(&h, "evaluated")], "51");
}

#[test]
fn tent_region_at_five_cells() {
    let text = stdout(&["region", "--N", "5"]);
    let (h, rows) = records(&text);
    assert_eq!(h, ["N", "sigma", "re", "im", "modulus", "in_region", "active_constraint"]);
    // 80 topologically mixing compositions, four nonleading eigenvalues each
    assert_eq!(rows.len(), 80 * 4);
    let k = column(&h, "in_region");
    assert!(rows.iter().all(|r| r[k] == "true"));
}

#[test]
fn region_preconditions_and_capacity() {
    assert_eq!(code(&["region", "--N", "4"]), 2);
    assert_eq!(code(&["region", "--N", "11"]), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["rate", "--bogus"]), 2);
    assert_eq!(code(&["rate", "--signature", "+q", "--N", "3"]), 2);
    assert_eq!(code(&["rate", "--signature", "+-"]), 2);
    assert_eq!(code(&["worst", "--signature", "+-", "--N", "10", "--strategy", "exhaustive"]), 3);
    assert_eq!(code(&["verify", "--suite", "nonsense"]), 2);
    assert_eq!(code(&["--workers", "0", "rate", "--signature", "+-", "--N", "3"]), 2);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    let args = ["region", "--N", "5"];
    let (h, rows) = records(&stdout(&args));
    let json: Value = serde_json::from_str(&stdout(&[&args[..], &["--format", "json"]].concat())).unwrap();
    let jrows = json["rows"].as_array().unwrap();
    assert_eq!(jrows.len(), rows.len());
    for (r, j) in rows.iter().zip(jrows) {
        for name in ["re", "im", "modulus"] {
            let csv_value: f64 = r[column(&h, name)].parse().unwrap();
            assert_eq!(csv_value, j[name].as_f64().unwrap(), "{name}");
        }
        assert_eq!(r[column(&h, "sigma")], j["sigma"].as_str().unwrap());
    }
}

#[test]
fn matrix_csv_and_kinds() {
    let text = stdout(&["matrix", "--signature", "+-", "--N", "3"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n=3,rowsum=2");
    assert_eq!(lines.len(), 4);
    let fine = stdout(&["matrix", "--kind", "fine", "--signature", "+-+", "--N", "4", "--perm", "2,1,4,3"]);
    assert!(fine.starts_with("n=12,rowsum=3\n"));
    let c = stdout(&["matrix", "--kind", "circulant", "--m", "3", "--N", "5"]);
    assert_eq!(c, "n=5,rowsum=3\n1,1,0,0,1\n1,1,1,0,0\n0,1,1,1,0\n0,0,1,1,1\n1,0,0,1,1\n");
    assert_eq!(code(&["matrix", "--kind", "permutation", "--N", "3"]), 2);
}

#[test]
fn spectrum_of_a_circulant() {
    let text = stdout(&["spectrum", "--kind", "circulant", "--m", "3", "--N", "5"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("order=5,rowsum=3.0"));
    assert_eq!(lines.next(), Some("re,im"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, [3.0, 0.0]);
    let golden = 1.0 + 2.0 * (2.0 * std::f64::consts::PI / 5.0).cos();
    let second: f64 = lines.next().unwrap().split(',').next().unwrap().parse().unwrap();
    assert!((second - golden).abs() < 1e-11);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    let path = path.to_str().unwrap();
    let text = stdout(&["matrix", "--signature", "++", "--N", "2", "--out", path]);
    assert!(text.is_empty());
    assert_eq!(std::fs::read_to_string(path).unwrap(), "n=2,rowsum=2\n1,1\n1,1\n");
}

#[test]
fn results_do_not_depend_on_worker_count() {
    for args in [
        &["worst", "--N", "9", "--signature", "+-+", "--samples", "3000", "--seed", "7"][..],
        &["correlate", "--signature", "+-", "--perm", "2,5,3,1,4", "--nmax", "8", "--samples", "9000"][..],
    ] {
        let one = stdout(&[&["--workers", "1"], args].concat());
        let many = stdout(&[&["--workers", "4"], args].concat());
        assert_eq!(one, many, "{args:?}");
    }
}

#[test]
fn correlate_reports_exact_and_sampled_values() {
    let text = stdout(&["correlate", "--signature", "+-", "--perm", "2,5,3,1,4", "--nmax", "20", "--samples", "20000"]);
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("# g="));
    assert!(header.contains("phi=") && header.contains("psi=") && header.contains("fitted_rate="));
    let (h, rows) = records(&text);
    assert_eq!(h, ["n", "C_exact", "C_mc", "mc_se"]);
    assert_eq!(rows.len(), 21);
    for r in &rows[..4] {
        let exact: f64 = r[1].parse().unwrap();
        let mc: f64 = r[2].parse().unwrap();
        let se: f64 = r[3].parse().unwrap();
        assert!((mc - exact).abs() <= 5.0 * se + 1e-12, "{r:?}");
    }
    let fitted: f64 = header
        .split("; ")
        .find_map(|kv| kv.strip_prefix("fitted_rate="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((fitted - (std::f64::consts::PI / 5.0).cos()).abs() < 0.02);
}

#[test]
fn correlate_with_given_observables_and_no_sampling() {
    let text = stdout(&["correlate", "--signature", "++", "--N", "3", "--phi", "1,0,0", "--psi", "0,0,1,1,1,1", "--nmax", "3", "--samples", "0"]);
    let (_, rows) = records(&text);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[2].is_empty() && r[3].is_empty()));
    // C(0) = |[0,1/3) n [1/3,1)| - (1/3)(2/3) = -2/9
    let c0: f64 = rows[0][1].parse().unwrap();
    assert!((c0 + 2.0 / 9.0).abs() < 1e-12);
}

#[test]
fn survey_grid() {
    let text = stdout(&["survey", "--m", "2..3", "--N", "2..4", "--signature", "sf,zigzag"]);
    let (h, rows) = records(&text);
    assert_eq!(h, ["m", "N", "signature", "mode", "strategy", "value", "argmax", "evaluated", "wall_ms"]);
    // m=2: N=2,3,4; m=3: N=3,4; two signatures each
    assert_eq!(rows.len(), 10);
}

#[test]
fn verify_suite_passes() {
    let text = stdout(&["verify", "--suite", "circulant"]);
    assert!(text.starts_with("[PASS] circulant"), "{text}");
    let json: Value = serde_json::from_str(&stdout(&["verify", "--suite", "circulant", "--format", "json"])).unwrap();
    assert_eq!(json[0]["passed"], true);
}
