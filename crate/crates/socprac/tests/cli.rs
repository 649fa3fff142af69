mod common;

use std::process::{Command, Output};

use common::scenario_path;

/// Runs the binary; arguments naming a shipped scenario become its path.
fn socprac(args: &[&str]) -> Output {
    let args: Vec<String> = args
        .iter()
        .map(|a| {
            let p = scenario_path(a);
            if p.is_file() { p.display().to_string() } else { a.to_string() }
        })
        .collect();
    Command::new(env!("CARGO_BIN_EXE_socprac")).args(&args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_accepts_the_shipped_model() {
    let o = socprac(&["validate", "--model", "kids_to_school.spm", "--practice", "kids_to_school.spp"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn validate_reports_non_serial_beliefs() {
    let o = socprac(&["validate", "--model", "defect_seriality.spm"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("not serial"), "{}", stdout(&o));
}

#[test]
fn check_practice_prints_three_verdicts() {
    let o = socprac(&["check-practice", "--model", "kids_to_school.spm", "--practice", "kids_to_school.spp"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for v in ["feasible: true", "normative: true", "complete: true"] {
        assert!(out.contains(v), "{out}");
    }
}

#[test]
fn query_file_evaluates_true() {
    let o = socprac(&["eval", "--model", "kids_to_school.spm", "--practice", "kids_to_school.spp", "kids_to_school.spq"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert_eq!(out.lines().filter(|l| l.ends_with("= true")).count(), 6, "{out}");
}

#[test]
fn malformed_formula_exits_with_a_located_error() {
    let o = socprac(&["eval", "--model", "kids_to_school.spm", "--world", "home", "--formula", "at_home & = before_9"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("1:11"), "{err}");
}

#[test]
fn simulated_trace_replays() {
    let o = socprac(&[
        "simulate", "--model", "kids_to_school.spm", "--practice", "kids_to_school.spp", "--seed", "5", "--format",
        "jsonl",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dir = std::env::temp_dir().join(format!("socprac-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.jsonl");
    std::fs::write(&path, &o.stdout).unwrap();
    let t = socprac(&["trace", "--model", "kids_to_school.spm", path.to_str().unwrap()]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(t.status.code(), Some(0), "{}", String::from_utf8_lossy(&t.stderr));
    assert!(stdout(&t).contains("reached_end"));
}

#[test]
fn generalize_merges_the_two_days() {
    let o = socprac(&["generalize", "--model", "two_days.spm", "day1.spp", "day2.spp"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("resources: car_a, car_b, car_c"), "{}", stdout(&o));
}
