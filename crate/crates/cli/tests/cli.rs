use std::io::{BufRead, BufReader};
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn linlayout(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linlayout"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn goldner_harary_solve_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&linlayout(&["generate", "goldner_harary", "-o", "gh.graphml"], d)), 0);

    let sat = linlayout(
        &["solve", "--pages", "stack,stack,stack", "--input", "gh.graphml", "-o", "gh.json", "--svg", "gh.svg"],
        d,
    );
    assert_eq!(code(&sat), 0, "{}", String::from_utf8_lossy(&sat.stderr));
    let svg = std::fs::read_to_string(d.join("gh.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<path").count() == 27);

    assert_eq!(code(&linlayout(&["solve", "--pages", "stack,stack", "--input", "gh.graphml"], d)), 1);

    let ok = linlayout(&["verify", "--pages", "stack,stack,stack", "-i", "gh.graphml", "--layout", "gh.json"], d);
    assert_eq!(code(&ok), 0);

    let mut layout: Value = serde_json::from_slice(&std::fs::read(d.join("gh.json")).unwrap()).unwrap();
    for page in layout["assignment"].as_object_mut().unwrap().values_mut() {
        *page = 0.into();
    }
    std::fs::write(d.join("tampered.json"), layout.to_string()).unwrap();
    let bad = linlayout(&["verify", "--pages", "stack,stack,stack", "-i", "gh.graphml", "--layout", "tampered.json"], d);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("StackCrossing"), "{}", stdout(&bad));

    layout["order"].as_array_mut().unwrap().pop();
    std::fs::write(d.join("short.json"), layout.to_string()).unwrap();
    let short = linlayout(&["verify", "--pages", "stack,stack,stack", "-i", "gh.graphml", "--layout", "short.json"], d);
    assert_eq!(code(&short), 1);
}

#[test]
fn job_json_constraints_and_restrictions() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = linlayout(&["generate", "skeleton", "-n", "4", "--format", "json", "--pages", "stack,stack", "-o", "job.json"], d);
    assert_eq!(code(&gen), 0);
    let job: Value = serde_json::from_slice(&std::fs::read(d.join("job.json")).unwrap()).unwrap();
    assert_eq!(job["pages"].as_array().unwrap().len(), 2);

    assert_eq!(code(&linlayout(&["solve", "-i", "job.json", "-o", "l.json"], d)), 0);
    std::fs::write(d.join("cs.json"), r#"[{"kind": "R2", "u": "A", "v": "B"}]"#).unwrap();
    let out = linlayout(&["solve", "-i", "job.json", "--constraints", "cs.json", "-o", "l2.json"], d);
    assert_eq!(code(&out), 0);
    let l: Value = serde_json::from_slice(&std::fs::read(d.join("l2.json")).unwrap()).unwrap();
    let order: Vec<&str> = l["order"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let (a, b) = (order.iter().position(|&v| v == "A").unwrap(), order.iter().position(|&v| v == "B").unwrap());
    assert_eq!(a.abs_diff(b), 1);
    // Two matching pages hold at most 2 * floor(6/2) edges; the skeleton has 11.
    let m = linlayout(&["solve", "-i", "job.json", "--restriction", "0:matching", "--restriction", "1:matching"], d);
    assert_eq!(code(&m), 1);
    std::fs::write(d.join("wrapped.json"), r#"{"constraints": [{"kind": "R1", "pred": "B", "succ": "A"}]}"#).unwrap();
    assert_eq!(code(&linlayout(&["solve", "-i", "job.json", "--constraints", "wrapped.json", "-o", "l3.json"], d)), 0);
}

#[test]
fn usage_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&linlayout(&["solve", "--bogus"], d)), 3);
    assert_eq!(code(&linlayout(&[], d)), 3);
    assert_eq!(code(&linlayout(&["--help"], d)), 0);
    assert_eq!(code(&linlayout(&["generate", "petersen"], d)), 3);
    assert_eq!(code(&linlayout(&["generate", "goldner_harary", "-o", "g.graphml"], d)), 0);
    // No page configuration anywhere.
    let out = linlayout(&["solve", "-i", "g.graphml"], d);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--pages"));
    assert_eq!(code(&linlayout(&["solve", "-i", "g.graphml", "--pages", "stack", "--restriction", "4:matching"], d)), 3);
    assert_eq!(code(&linlayout(&["solve", "-i", "g.graphml", "--pages", "book"], d)), 3);
    assert_eq!(code(&linlayout(&["solve", "-i", "missing.graphml", "--pages", "stack"], d)), 3);
    assert_eq!(code(&linlayout(&["solve", "-i", "g.graphml", "--pages", "stack", "--timeout", "0"], d)), 3);
}

#[test]
fn timeout_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("slow.sh"), "sleep 30\n").unwrap();
    assert_eq!(code(&linlayout(&["generate", "goldner_harary", "-o", "g.graphml"], d)), 0);
    let out = linlayout(
        &["solve", "-i", "g.graphml", "--pages", "stack,stack,stack", "--solver-cmd", "sh slow.sh {input}", "--timeout", "0.3"],
        d,
    );
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn experiment_outputs_recheck_in_a_separate_process() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for args in [&["step1", "-n", "10", "-o", "out"][..], &["step2", "-k", "3", "-o", "out"], &["step3", "-n", "6", "--seeds", "4", "--workers", "2", "-o", "out"]] {
        let out = linlayout(args, d);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let reports = std::fs::read_to_string(d.join("out/reports.jsonl")).unwrap();
    let lines: Vec<Value> = reports.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    for r in &lines {
        assert_eq!(r["status"], "sat");
        let id = r["id"].as_str().unwrap();
        let layout = r["layout_path"].as_str().unwrap();
        let job = d.join("out").join(format!("{id}.job.json"));
        let check = linlayout(&["verify", "-i", job.to_str().unwrap(), "--layout", layout], d);
        assert_eq!(code(&check), 0, "{id}: {}", stdout(&check));
    }
    // Same parameters, same status; reports are appended.
    assert_eq!(code(&linlayout(&["step1", "-n", "10", "-o", "out"], d)), 0);
    let again = std::fs::read_to_string(d.join("out/reports.jsonl")).unwrap();
    assert_eq!(again.lines().count(), 7);
    assert!(again.starts_with(&reports));
}

#[test]
fn serve_prints_its_address() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_linlayout"))
        .args(["serve", "--bind", "127.0.0.1:0", "--workers", "1", "--store"])
        .arg(dir.path().join("jobs.sqlite"))
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let base = line.trim().strip_prefix("listening on ").unwrap().to_string();
    let health: Value = reqwest::blocking::get(format!("{base}/health")).unwrap().json().unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert_eq!(health["status"], "ok");
    assert_eq!(health["workers"], 1);
}
