use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use laffaille::json::{self, Object};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_laffaille"));
    c.env_remove("LAFFAILLE_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("laffaille-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ring_laws_pass_with_json_lines() {
    let o = run(&["verify", "--suite", "ring-laws", "--p", "3", "--Np", "6", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines[0]["status"], "pass");
    assert_eq!(lines.last().unwrap()["summary"]["ok"], true);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--suite", "section", "--suite", "unipotence", "--p", "5", "--r", "3", "--seeds", "1..6"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}

#[test]
fn gen_then_apply_both_functors() {
    let dir = scratch("functors");
    let out = dir.to_str().unwrap();
    assert!(run(&["gen", "fl", "--d", "2", "--jumps", "0,2", "--seed", "7", "--out", out]).status.success());
    let fl = dir.join("fl-seed7.json");
    let (amb, Object::Fl(m)) = json::from_str(&fs::read_to_string(&fl).unwrap()).unwrap() else { panic!() };
    assert_eq!(m.jumps, vec![0, 2]);

    assert!(run(&["apply", "mls", "--input", fl.to_str().unwrap(), "--out", out]).status.success());
    let o = run(&["apply", "mfl", "--input", dir.join("mls.json").to_str().unwrap()]);
    assert!(o.status.success());
    let (_, Object::Fl(back)) = json::from_str(&stdout(&o)).unwrap() else { panic!() };
    assert_eq!(back.jumps, m.jumps);
    assert!(back.ftil.eq_mod(&amb.witt, &m.ftil, amb.n_p()));

    let o = run(&["section", "--input", dir.join("mls.json").to_str().unwrap()]);
    let (_, Object::Section(s)) = json::from_str(&stdout(&o)).unwrap() else { panic!() };
    assert_eq!(s.iterations, 0);
}

#[test]
fn output_directory_from_environment() {
    let dir = scratch("env");
    let o = bin()
        .env("LAFFAILLE_OUT", &dir)
        .args(["verify", "--suite", "lemfltos", "--p", "5", "--r", "3", "--seeds", "1,2"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let report = fs::read_to_string(dir.join("report.jsonl")).unwrap();
    assert_eq!(report.lines().count(), 3);
    assert!(fs::read_to_string(dir.join("summary.txt")).unwrap().contains("lemfltos"));

    let o = run(&["report", "--input", dir.join("report.jsonl").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2/2 passed"));
}

#[test]
fn stored_instances_can_be_rechecked() {
    let dir = scratch("recheck");
    let out = dir.to_str().unwrap();
    assert!(run(&["gen", "kisin-gls", "--p", "5", "--r", "3", "--seed", "3", "--out", out]).status.success());
    let f = dir.join("kisingls-seed3.json");
    let o = run(&["verify", "--suite", "kisin-breuil-consistency", "--suite", "section", "--input", f.to_str().unwrap(), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn failing_summary_exits_one() {
    let dir = scratch("failing");
    let good = stdout(&run(&["verify", "--suite", "easylemma", "--seed", "4"]));
    let bad = good.replace("\"ok\":true", "\"ok\":false");
    assert_ne!(good, bad);
    fs::write(dir.join("r.jsonl"), bad).unwrap();
    assert_eq!(run(&["report", "--input", dir.join("r.jsonl").to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["bogus"][..],
        &["gen", "fl", "--jumps", "2,0"],
        &["gen", "fl", "--d", "3", "--jumps", "0,1"],
        &["gen", "fl", "--p", "2"],
        &["verify", "--suite", "nope"],
        &["verify", "--suite", "ring-laws", "--seeds", "9..1"],
        &["apply", "mfl", "--input", "/nonexistent.json"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    let o = run(&["gen", "fl", "--p", "2"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("p = 2"));
}
