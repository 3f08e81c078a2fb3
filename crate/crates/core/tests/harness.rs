use std::fs;
use std::process::Command;

use manet_core::error::Error;
use manet_core::harness::reference::{self, Source};
use manet_core::harness::{
    compare_summaries, parse_finals, parse_grades, run_campaign, Algorithm, CampaignConfig, GRADES_HEADER,
};

fn small(algorithm: Algorithm, out: &std::path::Path, workers: usize) -> CampaignConfig {
    let mut cfg = CampaignConfig::new(algorithm, out);
    cfg.functions = vec![1, 5, 6];
    cfg.dimensions = vec![30];
    cfg.runs = 3;
    cfg.budget_multiplier = 20;
    cfg.workers = workers;
    cfg
}

fn is_sci(s: &str) -> bool {
    let Some((m, e)) = s.split_once('e') else { return false };
    let m = m.strip_prefix('-').unwrap_or(m);
    let mantissa_ok = m.len() == 4 && m.as_bytes()[1] == b'.' && m.chars().filter(char::is_ascii_digit).count() == 3;
    let exp_ok = (e.starts_with('+') || e.starts_with('-')) && e.len() >= 3 && e[1..].chars().all(|c| c.is_ascii_digit());
    mantissa_ok && exp_ok
}

#[test]
fn grades_are_byte_identical_across_reruns_and_worker_counts() {
    for algorithm in [Algorithm::Manet, Algorithm::Jso] {
        let dirs: Vec<_> = (0..3).map(|_| tempfile::tempdir().unwrap()).collect();
        let mut texts = Vec::new();
        for (dir, workers) in dirs.iter().zip([1, 1, 3]) {
            run_campaign(&small(algorithm, dir.path(), workers)).unwrap();
            let d = dir.path().join(algorithm.name()).join("D30");
            let read = |name: &str| fs::read(d.join(name)).unwrap();
            texts.push((read("grades.csv"), read("finals.csv"), read("meta.json"), read("trace_F5_D30_run2.csv")));
        }
        assert_eq!(texts[0], texts[1], "{algorithm}: rerun differs");
        assert_eq!(texts[0], texts[2], "{algorithm}: worker count changes output");
    }
}

#[test]
fn output_files_follow_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small(Algorithm::Manet, dir.path(), 2);
    cfg.functions = vec![6];
    let out = run_campaign(&cfg).unwrap();
    assert_eq!(out.dimensions.len(), 1);
    let d = dir.path().join("manet").join("D30");
    let grades = fs::read_to_string(d.join("grades.csv")).unwrap();
    let mut lines = grades.lines();
    assert_eq!(lines.next(), Some(GRADES_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1);
    let fields: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(&fields[..2], &["6", "30"]);
    assert!(fields[2..].iter().all(|f| is_sci(f)), "{rows:?}");
    for r in 0..3 {
        let trace = fs::read_to_string(d.join(format!("trace_F6_D30_run{r}.csv"))).unwrap();
        assert!(trace.starts_with("fes,best_f\n"));
        assert!(trace.lines().last().unwrap().starts_with("600,"));
    }
    assert!(!d.join("trace_F6_D30_run3.csv").exists());
    let finals = parse_finals(&fs::read_to_string(d.join("finals.csv")).unwrap()).unwrap();
    assert_eq!(finals[&6].len(), 3);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["algorithm"], "manet");
    assert_eq!(meta["max_fes"], 600);
    assert_eq!(meta["trials"].as_array().unwrap().len(), 3);
    assert_eq!(meta["trials"][1]["seed"], 1);
    let parsed = parse_grades(&grades).unwrap();
    assert_eq!(parsed, out.dimensions[0].2.iter().map(|r| {
        let mut r = *r;
        let round = |v: f64| manet_core::harness::format_sci(v).parse::<f64>().unwrap();
        r.summary.best = round(r.summary.best);
        r.summary.worst = round(r.summary.worst);
        r.summary.mean = round(r.summary.mean);
        r.summary.median = round(r.summary.median);
        r.summary.std = round(r.summary.std);
        r
    }).collect::<Vec<_>>());
}

#[test]
fn missing_std_column_is_reported_by_name() {
    let text = reference::MANET_D30.replace(",std", "").replace(",2.03e+02", "");
    match parse_grades(&text) {
        Err(Error::Parse(msg)) => assert!(msg.contains("\"std\""), "{msg}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn published_table_one_tally() {
    let manet = reference::rows(Source::Manet, 30).unwrap();
    let jso = reference::rows(Source::Jso, 30).unwrap();
    assert_eq!(compare_summaries(&manet, &jso).unwrap().tally.to_string(), "+:4 =:2 -:3");
}

#[test]
fn cli_runs_and_rejects_bad_input() {
    let exe = env!("CARGO_BIN_EXE_manet-bench");
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(exe)
        .args(["--algo", "jso", "--funcs", "4-5", "--dims", "30", "--runs", "2", "--budget-multiplier", "50"])
        .args(["--workers", "2", "--compare-ref", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("tally +:"), "{stdout}");
    let grades = dir.path().join("jso").join("D30").join("grades.csv");
    assert_eq!(fs::read_to_string(&grades).unwrap().lines().count(), 3);
    assert!(dir.path().join("jso").join("D30").join("compare_ref.txt").exists());

    let again = Command::new(exe).arg("--grades").arg(&grades).output().unwrap();
    assert!(again.status.success());

    for bad in [&["--funcs", "2"][..], &["--dims", "40"], &["--runs", "0"], &["--algo", "pso"]] {
        let out = Command::new(exe).args(bad).arg("--out").arg(dir.path()).output().unwrap();
        assert!(!out.status.success(), "{bad:?}");
        assert!(!out.stderr.is_empty());
    }
}
