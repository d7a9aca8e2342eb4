use std::process::{Command, Output};

use serde_json::Value;

fn dioph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dioph"))
        .args(args)
        .output()
        .expect("spawn dioph")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn ball_example() {
    let out = dioph(&["ball", "--l", "3", "--x", "2,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["command"], "ball");
    assert_eq!(v["results"]["count"], 53);
    assert_eq!(v["results"]["d_l"], 0.5);
    for key in ["r", "a", "ln_A", "ln_B", "C_r", "c", "C"] {
        assert!(v["config"]["constants"][key].is_number(), "{key}");
    }
}

#[test]
fn tail_example_is_finite() {
    let out = dioph(&["tail", "--alpha", "0.99", "--a", "8", "--n", "5", "--lmax", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["results"]["finite"], true);
    assert!(v["results"]["total"].as_f64().unwrap() > 0.0);
}

#[test]
fn tail_without_decay_is_an_error() {
    let out = dioph(&["tail", "--alpha", "0.5", "--a", "8", "--n", "5", "--lmax", "60"]);
    assert_eq!(out.status.code(), Some(1));
    let out = dioph(&[
        "tail",
        "--alpha",
        "0.5",
        "--a",
        "8",
        "--n",
        "5",
        "--lmax",
        "60",
        "--uncertified",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["finite"], false);
}

#[test]
fn unknown_flag_prints_usage() {
    let out = dioph(&["ball", "--l", "3", "--x", "2,0", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(dioph(&["--help"]).status.code(), Some(0));
    assert_eq!(dioph(&["--version"]).status.code(), Some(0));
}

#[test]
fn flag_errors_name_the_flag() {
    let cases: [(&[&str], &str); 4] = [
        (&["ball", "--l", "3", "--x", "two"], "--x"),
        (&["cover", "--l", "3", "--k", "1", "--r", "1.5"], "--r"),
        (
            &["scan", "--rect", "1,1,0,0", "--step", "0.1", "--l", "2", "--A", "2"],
            "--rect",
        ),
        (&["ball", "--l", "3", "--x", "2,0", "--csv"], "--format"),
    ];
    for (args, flag) in cases {
        let out = dioph(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(flag), "{args:?}: {err}");
    }
}

#[test]
fn inside_unit_disk_is_an_error() {
    let out = dioph(&["ball", "--l", "2", "--x", "0.5,0.5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--x"));
}

#[test]
fn beta_csv_has_header_block() {
    let out = dioph(&["beta", "--lmax", "4", "--x", "2,0", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let comments: Vec<&str> = text.lines().take_while(|l| l.starts_with('#')).collect();
    assert!(comments.contains(&"# command=beta"));
    assert!(comments.iter().any(|l| l.starts_with("# const.ln_B=")));
    let mut rows = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["l", "count", "d_l", "beta_l"]);
    let counts: Vec<String> = rows.records().map(|r| r.unwrap()[1].to_string()).collect();
    assert_eq!(counts, ["5", "17", "53", "153"]);
}

#[test]
fn exact_relations_do_not_zero_the_gap() {
    // x - 2 vanishes at x = 2 and x - 3 at x = 3; the exact test excludes them
    for x in ["2", "3,0"] {
        let v = json(&dioph(&["ball", "--l", "6", "--x", x]));
        assert!(v["results"]["d_l"].as_f64().unwrap() > 0.0, "{x}");
        assert!(v["results"]["relations"].as_u64().unwrap() > 0, "{x}");
    }
}

#[test]
fn family_jsonl_lists_every_polynomial() {
    let out = dioph(&["family", "--l", "2", "--jsonl"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let head: Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(head["results"]["count"], 61);
    assert_eq!(head["results"]["consistent"], true);
    let polys: Vec<Vec<i64>> = lines.map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(polys.len(), 61);
    assert!(polys
        .iter()
        .all(|p| p.iter().map(|c| c.unsigned_abs()).sum::<u64>() <= 2 && p.len() <= 5));

    let v = json(&dioph(&["family", "--l", "4", "--count-only"]));
    assert_eq!(v["results"]["count"], 5641);
    assert!(v["results"].get("polynomials").is_none());
}

#[test]
fn jensen_csv_and_violation_exit() {
    let out = dioph(&["jensen", "--l", "2", "--csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    assert_eq!(
        rows.headers().unwrap(),
        vec!["poly-id", "degree", "max-coeff", "large-roots", "witness-Cr", "pass"]
    );
    assert_eq!(rows.records().count(), 60);
    // a constant far below the true one must be reported as a bound violation
    let out = dioph(&["jensen", "--l", "3", "--c-r", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["results"]["failures"].as_u64().unwrap() > 0);
}

#[test]
fn cover_reports_verdicts() {
    let out = dioph(&["cover", "--l", "2", "--k", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &v["results"];
    assert_eq!(r["family_size"], 61);
    assert_eq!(r["verdicts"].as_array().unwrap().len(), 61);
    let first = &r["verdicts"][0];
    for key in ["poly", "coverable", "disks", "witness"] {
        assert!(first.get(key).is_some(), "{key}");
    }
    assert_eq!(r["count_within_bound"], true);

    // below the sufficient B the separation sweep finds real pairs
    let out = dioph(&[
        "cover",
        "--l",
        "3",
        "--k",
        "1",
        "--a",
        "2",
        "--ln-B",
        "0.4",
        "--A",
        "1.5",
        "--separation",
    ]);
    let v = json(&out);
    let sep = &v["results"]["separation"];
    assert!(sep["pairs_checked"].as_u64().unwrap() > 0);
    assert_eq!(sep["unexplained"], 0);
    assert_eq!(v["config"]["constants"]["ln_B"], 0.4);
}

#[test]
fn scan_csv_rows() {
    let out = dioph(&[
        "scan",
        "--rect",
        "1.5,0,1.6,0.1",
        "--step",
        "0.05",
        "--l",
        "3",
        "--A",
        "2",
        "--csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap().len(), 7);
    assert_eq!(rows.records().count(), 9);
}

#[test]
fn seed_is_recorded_and_output_is_stable() {
    let a = dioph(&["jensen", "--l", "2", "--seed", "5"]);
    let b = dioph(&["jensen", "--l", "2", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["config"]["seed"], 5);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.json");
    let p = path.to_str().unwrap();
    let args = [
        "scan",
        "--rect",
        "1.5,0,1.6,0.1",
        "--step",
        "0.05",
        "--l",
        "3",
        "--A",
        "2",
        "--thresholds",
        "3",
        "--out",
        p,
    ];
    assert_eq!(dioph(&args).status.code(), Some(0));
    let first = std::fs::read(&path).unwrap();
    dioph(&args);
    assert_eq!(first, std::fs::read(&path).unwrap());
}
