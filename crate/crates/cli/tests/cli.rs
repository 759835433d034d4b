use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn etaq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etaq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn check_reports_orders_and_classification() {
    let o = etaq(&["check", "35; 1:2, 35:2"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("cusp_form"), "{out}");
    let orders: Vec<&str> = out.lines().filter(|l| l.starts_with("  1/")).map(str::trim).collect();
    assert_eq!(orders, ["1/1 3", "1/5 1", "1/7 1", "1/35 3"]);

    let o = etaq(&["check", "1;"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("holomorphic"));

    let o = etaq(&["check", "5; 1:-1, 5:5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classification"], "holomorphic");
}

#[test]
fn check_rejects_malformed_quotients() {
    for bad in ["35; 2:1", "35 1:2", "x; 1:1", "35; 1:"] {
        let o = etaq(&["check", bad]);
        assert_eq!(code(&o), 2, "{bad}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn expand_prints_leading_terms() {
    let o = etaq(&["expand", "35; 1:2, 35:2", "-n", "7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "q^3 - 2q^4 - q^5 + 2q^6 + q^7 + 2q^8 - 2q^9");
    let o = etaq(&["expand", "55; 1:3, 5:3, 11:3, 55:3", "-n", "4"]);
    assert_eq!(stdout(&o).trim(), "q^9 - 3q^10 + 5q^12");
    let o = etaq(&["expand", "1;"]);
    assert_eq!(stdout(&o).trim(), "1");
}

#[test]
fn small_numeric_subcommands() {
    assert_eq!(stdout(&etaq(&["dim", "55", "8"])).trim(), "40");
    assert_eq!(stdout(&etaq(&["dim", "35", "2"])).trim(), "3");
    assert_eq!(stdout(&etaq(&["sturm", "55", "8"])).trim(), "48");
    assert_eq!(stdout(&etaq(&["sturm", "35", "2"])).trim(), "8");
    let o = etaq(&["profile", "35", "--format", "json"]);
    assert_eq!(code(&o), 0);
    serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap();
    let o = etaq(&["cusps", "25"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#')).count(), 6);
}

#[test]
fn exists_exit_codes() {
    let o = etaq(&["exists", "29", "2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("NO"));
    let o = etaq(&["exists", "5", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("YES"));
    assert!(stdout(&o).contains("5; 1:-1, 5:5"));
    let o = etaq(&["exists", "13", "17", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("221;"));
    assert_eq!(code(&etaq(&["exists", "4", "2"])), 2);
    assert_eq!(code(&etaq(&["exists", "5", "3"])), 2);
}

#[test]
fn enumerate_is_independent_of_jobs() {
    let one = etaq(&["enumerate", "--level", "77", "--weight", "4", "--jobs", "1", "--format", "json"]);
    let many = etaq(&["enumerate", "--level", "77", "--weight", "4", "--jobs", "6", "--format", "json"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
    let o = etaq(&["enumerate", "--level", "35", "--weight", "2"]);
    let out = stdout(&o);
    for q in ["35; 1:1, 5:1, 7:1, 35:1", "35; 1:2, 35:2", "35; 5:2, 7:2"] {
        assert!(out.contains(q), "{out}");
    }
    assert_eq!(code(&etaq(&["enumerate", "--level", "45", "--weight", "2"])), 2);
}

#[test]
fn decompose_level_35() {
    let o = etaq(&["decompose", &fixture("level35.txt"), "--basis", &fixture("level35_basis.txt")]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().any(|l| l.trim() == "f = g2 + g3"), "{}", stdout(&o));

    let from_curve = etaq(&["decompose", "--curve", "0,1,1,9,1", "--conductor", "35", "--basis", &fixture("level35_basis.txt")]);
    assert_eq!(code(&from_curve), 0);
    assert_eq!(from_curve.stdout, o.stdout);

    let v = etaq(&["verify", &fixture("level35.txt")]);
    assert_eq!(code(&v), 0);
    assert!(stdout(&v).contains("verified"));
}

#[test]
fn decompose_level_55_is_deterministic() {
    let args = |jobs: &'static str| {
        vec!["decompose".to_string(), fixture("level55.txt"), "--format".into(), "json".into(), "--jobs".into(), jobs.into()]
    };
    let run = |a: Vec<String>| Command::new(env!("CARGO_BIN_EXE_etaq")).args(&a).output().unwrap();
    let a = run(args("1"));
    let b = run(args("4"));
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["level"], 55);
    // rationals travel as strings
    assert!(v["entries"][0]["coefficient"].is_string());
}

#[test]
fn listed_coefficients_are_checked_exactly() {
    let o = etaq(&[
        "verify",
        &fixture("level55.txt"),
        "--margin",
        "10",
        "--multiplier",
        "55; 1:3,5:3,11:3,55:3",
        "--basis",
        &fixture("table1.txt"),
        "--coefficients",
        &fixture("table2.txt"),
    ]);
    // the shipped coefficient table does not reproduce f·a
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("MISMATCH"));
}

#[test]
fn malformed_targets_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("gap.txt", "level 35\n1 1\n3 1\n"),
        ("text.txt", "level 35\n1 one\n"),
        ("empty.txt", "# nothing\n"),
        ("nolevel.txt", "1 1\n2 0\n"),
    ];
    for (name, body) in cases {
        let path = dir.path().join(name);
        std::fs::write(&path, body).unwrap();
        let o = etaq(&["decompose", path.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{name}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let o = etaq(&["decompose", dir.path().join("missing.txt").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = etaq(&["decompose", "--curve", "0,0,0,0,0", "--conductor", "35"]);
    assert_eq!(code(&o), 2);
    // too few coefficients for the Sturm bound
    let path = dir.path().join("short.txt");
    std::fs::write(&path, "level 35\n1 1\n2 0\n3 1\n").unwrap();
    let o = etaq(&["decompose", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("precision"));
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(code(&etaq(&[])), 2);
    assert_eq!(code(&etaq(&["frobnicate"])), 2);
    assert_eq!(code(&etaq(&["sturm", "0", "2"])), 2);
}
