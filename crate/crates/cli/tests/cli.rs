use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bnobs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bnobs"))
        .env_remove("BNOBS_MAX_NODES")
        .args(args)
        .output()
        .unwrap()
}

fn text(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name).to_str().unwrap().to_string()
}

fn generated(name: &str, args: &[&str]) -> String {
    let path = tmp(&format!("{name}.bn"));
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &path]);
    assert!(bnobs(&full).status.success());
    path
}

#[test]
fn check_reports_horizon_and_witness() {
    let best = generated("best2", &["--family", "and_or_best2", "--n", "3"]);
    assert_eq!(text(&bnobs(&["check", &best])), "observable, horizon 3\n");
    let ex1 = generated("example1", &["--family", "example1"]);
    let out = bnobs(&["check", &ex1, "--observe", "1"]);
    assert_eq!(text(&out), "unobservable, witness 000 / 010\n");
    let json: serde_json::Value =
        serde_json::from_slice(&bnobs(&["check", &ex1, "--observe", "1", "--json"]).stdout).unwrap();
    assert_eq!(json["observable"], false);
    assert_eq!(json["witness"][1], "010");
}

#[test]
fn summary_lines() {
    let ex1 = generated("example1", &["--family", "example1"]);
    let out = text(&bnobs(&["summary", &ex1]));
    assert!(out.starts_with("n = 3, r = 5 distinct time-1 states\n"));
    assert!(out.contains("max COUNT 3; count bound m ≥ 2\n"));
    assert!(out.contains("fixed points 1 [000]; fixed-point bound m ≥ 0\n"));
}

#[test]
fn coefficient_rows() {
    let out = text(&bnobs(&["coeffs", "--k-min", "3", "--k-max", "3"]));
    assert!(out.contains("K=3, 0.4564, 0.5714, 0.0456, 0.3333, true, true\n"), "{out}");
    let csv = text(&bnobs(&["coeffs", "--k-min", "2", "--k-max", "30", "--csv", "-"]));
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    assert_eq!(reader.records().count(), 29);
}

#[test]
fn exit_codes() {
    let ex1 = generated("example1", &["--family", "example1"]);
    assert_eq!(bnobs(&["parse", "/nonexistent/x.bn"]).status.code(), Some(2));
    assert_eq!(bnobs(&["check", &ex1]).status.code(), Some(2), "no observers");
    let bad = tmp("bad.bn");
    fs::write(&bad, "nodes: 1\nx1 = FOO(x1)\n").unwrap();
    assert_eq!(bnobs(&["parse", &bad]).status.code(), Some(2));

    assert_eq!(bnobs(&["--max-nodes", "2", "summary", &ex1]).status.code(), Some(3));
    let big = generated("nc40", &["--family", "nc", "--k", "4", "--n", "40"]);
    assert_eq!(bnobs(&["summary", &big]).status.code(), Some(3));
    assert_eq!(bnobs(&["gen", "--family", "xor_complement", "--k", "4"]).status.code(), Some(3));

    let out = bnobs(&["check", &ex1, "--observe", "1", "--expect", "observable"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(text(&out), "unobservable, witness 000 / 010\n");
    let ok = bnobs(&["check", &ex1, "--observe", "1", "--expect", "unobservable"]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn generated_files_reparse_and_check() {
    let cases: [&[&str]; 5] = [
        &["--family", "nc", "--k", "4", "--n", "11"],
        &["--family", "and_or_bestK", "--k", "3", "--n", "7"],
        &["--family", "xor_ring", "--n", "6"],
        &["--family", "xor_complement_copies", "--k", "3", "--n", "8"],
        &["--family", "exmp"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = generated(&format!("family{i}"), args);
        let canonical = text(&bnobs(&["parse", &path]));
        let again = tmp(&format!("family{i}.canonical.bn"));
        fs::write(&again, &canonical).unwrap();
        assert_eq!(text(&bnobs(&["parse", &again])), canonical);
        let out = bnobs(&["check", &path, "--expect", "observable"]);
        assert!(out.status.success(), "{args:?}: {}", text(&out));
    }
}

#[test]
fn class_bounds() {
    let out = text(&bnobs(&["bounds", "--class", "and-or", "--k", "2", "--n", "100"]));
    assert!(out.contains("m ≥ 19"), "{out}");
}
