use std::path::Path;
use std::process::{Command, Output};

use symlab::report::{parse_csv, parse_jsonl, render_table, Format, Record};

fn symlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symlab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn exhaustive_survey_csv() {
    let o = symlab(&["survey", "--n", "1..4", "--exhaustive", "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let (_, records) = parse_csv(&text).unwrap();
    let p: Vec<String> = records
        .iter()
        .map(|r| match r {
            Record::Survey(s) => s.p_hat.to_string(),
            _ => unreachable!(),
        })
        .collect();
    assert_eq!(p[..2], ["1/2", "1/2"]);
    assert!(text.lines().nth(1).unwrap().starts_with("1,2,1,1/2,"));
}

#[test]
fn decoupling_sweep_reports_all_events() {
    let o = symlab(&["decoupling", "--exhaustive-bits", "2,2"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("all 65536 events hold"));
}

#[test]
fn chain_runs_are_identical() {
    let args = ["chain", "--n-max", "5", "--seeds", "1", "--epsilon", "0.1"];
    let a = symlab(&args);
    let b = symlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(parse_jsonl(&stdout(&a)).unwrap().len(), 1);
}

#[test]
fn exit_codes() {
    assert_eq!(symlab(&["oracle", "--n", "8"]).status.code(), Some(3));
    assert_eq!(symlab(&["survey", "--n", "4", "--trials", "10"]).status.code(), Some(2));
    assert_eq!(symlab(&["survey", "--n", "4", "--seed", "1", "--trials", "10", "--epsilon", "0.2"]).status.code(), Some(2));
    assert_eq!(symlab(&["chain", "--n-max", "4", "--seed", "1", "--epsilon", "1.5"]).status.code(), Some(2));
    assert_eq!(symlab(&["chain", "--n-max", "4", "--seed", "1", "--primes", "15"]).status.code(), Some(2));
    assert_eq!(symlab(&["survey", "--n", "4", "--seed", "1", "--trials", "9", "--dist", "bogus"]).status.code(), Some(2));
    assert_eq!(symlab(&["survey", "--n", "4", "--exhaustive", "--dist", "custom:0:1/3,1:2/3"]).status.code(), Some(2));
    let o = symlab(&["survey", "--n", "4", "--trials", "10"]);
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn failed_runs_leave_no_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = symlab(&["oracle", "--n", "2,8", "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

fn run_to(args: &[&str], out: &Path) {
    let mut v = args.to_vec();
    v.extend(["--output", out.to_str().unwrap()]);
    let o = symlab(&v);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn replayed_manifest_reproduces_data() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    run_to(&["classify", "--n", "9", "--trials", "40", "--seed", "17", "--threads", "1"], &a);
    let manifest = dir.path().join("a.jsonl.manifest.json");
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    assert_eq!(m["total_trials"], 40);
    assert_eq!(m["config"]["command"], "classify");
    let b = dir.path().join("b.jsonl");
    let o = symlab(&["replay", manifest.to_str().unwrap(), "--output", b.to_str().unwrap(), "--threads", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn emitted_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["survey", "--n", "5,9", "--trials", "3000", "--seed", "2"],
        &["chain", "--n-max", "10", "--trials", "5", "--seed", "2"],
        &["classify", "--n", "7", "--trials", "20", "--seed", "2"],
        &["concentration", "--n", "6,20", "--trials", "4000", "--seed", "2"],
        &["decoupling", "--bits", "1,2", "--events", "30", "--seed", "2"],
        &["oracle", "--n", "1..3"],
    ];
    for (i, args) in cases.iter().enumerate() {
        for format in ["jsonl", "csv"] {
            let path = dir.path().join(format!("{i}.{format}"));
            let mut v = args.to_vec();
            v.extend(["--format", format]);
            run_to(&v, &path);
            let text = std::fs::read_to_string(&path).unwrap();
            let (kind, records, fmt) = if format == "jsonl" {
                let r = parse_jsonl(&text).unwrap();
                (r[0].kind(), r, Format::Jsonl)
            } else {
                let (k, r) = parse_csv(&text).unwrap();
                (k, r, Format::Csv)
            };
            assert!(!records.is_empty());
            assert_eq!(render_table(kind, &records, fmt).unwrap(), text, "{args:?} {format}");
        }
    }
}
