use std::process::{Command, Output};

use capitula_cli::{read_records, RunRecord, Status};

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_capitula"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_record(o: &Output) -> RunRecord {
    let text = stdout(o);
    RunRecord::from_json_line(text.lines().next().expect("one record")).unwrap()
}

#[test]
fn classgroup_examples() {
    let o = run(&["classgroup", "--d", "79"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("h = 3, structure Z/3"));
    let o = run(&["classgroup", "--d", "2"], &[]);
    assert!(stdout(&o).contains("h = 1, trivial"));
    let o = run(&["classgroup", "--d", "12"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not squarefree"));
}

#[test]
fn search_examples() {
    let o = run(&["--json", "search", "--d", "79", "--p", "3", "--n", "1", "--class", "generator"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let rec = json_record(&o);
    assert_eq!(rec.q, Some(7));
    assert_eq!(rec.condition_flags, Some([true; 6]));
    assert!(rec.certificate.is_none());

    let o = run(&["search", "--d", "79", "--p", "5", "--n", "1", "--class", "generator"], &[]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["--json", "search", "--d", "79", "--qbound", "6"], &[]);
    assert_eq!(o.status.code(), Some(1));
    let rec = json_record(&o);
    assert_eq!(rec.status, Status::Exhausted);
    assert_eq!(rec.scan.unwrap().failed_at, [0, 1, 0, 0, 0, 0]);
}

#[test]
fn flags_override_environment() {
    let o = run(&["--json", "search", "--d", "79"], &[("CAPITULA_QBOUND", "6")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_record(&o).config.q_bound, Some(6));
    let o = run(&["--json", "search", "--d", "79", "--qbound", "100"], &[("CAPITULA_QBOUND", "6")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_record(&o).config.q_bound, Some(100));
    let help = stdout(&run(&["search", "--help"], &[]));
    assert!(help.contains("CAPITULA_QBOUND") && help.contains("1000000"));
}

#[test]
fn certify_examples_and_record_file() {
    let dir = std::env::temp_dir().join(format!("capitula-commands-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("records.jsonl");
    let _ = std::fs::remove_file(&out);
    let path = out.to_str().unwrap();

    let o = run(&["--out", path, "certify", "--d", "79", "--p", "3", "--n", "1", "--class", "generator"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("principal in L: false"));
    let o = run(&["--out", path, "certify", "--d", "2", "--p", "3", "--n", "1", "--class", "identity"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("already-principal"));
    let o = run(&["--out", path, "certify", "--d", "79", "--p", "3", "--n", "0"], &[]);
    assert_eq!(o.status.code(), Some(2));

    let recs = read_records(&out).unwrap();
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r.certificate.is_some()));
    assert!(recs[1].flags.contains(&"already-principal".to_string()));
    let o = run(&["verify", "--records", path], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).matches("valid").count(), 2);

    // a tampered record fails re-verification with exit 3
    let text = std::fs::read_to_string(&out).unwrap();
    let mut rec = RunRecord::from_json_line(text.lines().next().unwrap()).unwrap();
    rec.certificate.as_mut().unwrap().alpha[0] += 1;
    let bad = dir.join("bad.jsonl");
    std::fs::write(&bad, rec.to_json_line() + "\n").unwrap();
    let o = run(&["verify", "--records", bad.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(3));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn certify_with_given_prime() {
    let o = run(&["--json", "certify", "--d", "79", "--q", "13"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let rec = json_record(&o);
    assert_eq!(rec.q, Some(13));
    assert_eq!(rec.certificate.unwrap().norm_alpha.magnitude().to_string(), "2197");
    let o = run(&["certify", "--d", "79", "--q", "11"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identical_inputs_give_identical_records() {
    let args = ["--json", "certify", "--d", "79", "--q", "13"];
    let a = json_record(&run(&args, &[]));
    let b = json_record(&run(&args, &[("CAPITULA_JOBS", "1")]));
    let mut b = b.without_timings();
    b.config.jobs = None;
    assert_eq!(a.without_timings(), b);
}

#[test]
fn survey_examples() {
    let o = run(&["survey", "--dmin", "10", "--dmax", "2", "--p", "3"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).is_empty());
    let o = run(&["survey", "--dmin", "2", "--dmax", "500", "--p", "4"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["--json", "survey", "--dmin", "2", "--dmax", "100", "--p", "3"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let ds: Vec<i64> = stdout(&o).lines().map(|l| RunRecord::from_json_line(l).unwrap().d.unwrap()).collect();
    assert_eq!(ds, vec![79]);
}

#[test]
fn bound_examples() {
    let o = run(&["bound", "--g", "2", "--n", "1", "--w", "1"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("H^0 exponent >= 1") && s.contains("H^1 exponent  = 2") && s.contains("met"));
    let o = run(&["--json", "bound", "--g", "2", "--n", "1", "--w", "2"], &[]);
    assert!(!json_record(&o).bound_report.unwrap().threshold_met);
    let o = run(&["--json", "bound", "--g", "6", "--n", "2", "--delta", "1", "--w", "1"], &[]);
    let r = json_record(&o).bound_report.unwrap();
    assert_eq!((r.h0_exp, r.h1_exp, r.threshold_met), (9, 11, true));
    let o = run(&["bound", "--g", "1", "--n", "1", "--w", "1"], &[]);
    assert_eq!(o.status.code(), Some(2));
}
