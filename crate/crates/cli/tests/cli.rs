use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn arcbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arcbench")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../harness/tests/fixtures/replay")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::create_dir_all(p.parent().unwrap()).unwrap();
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn composition_on_hand_buckets_prints_p() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "b.json", r#"[{"n": 1, "w": 2, "a": 0.9}, {"n": 2, "w": 1, "a": 0.6}]"#);
    let o = arcbench(&["stats", "composition", "--in", input.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{o:?}");
    assert!(stdout(&o).lines().any(|l| l == "p = 0.8"), "{}", stdout(&o));

    let o = arcbench(&["stats", "composition", "--in", input.to_str().unwrap(), "--y", "0.5"]);
    assert!(stdout(&o).contains("x_hat = "), "{}", stdout(&o));
    let bad = write(dir.path(), "bad.json", r#"[{"n": 11, "w": 1, "a": 0.5}]"#);
    assert_eq!(code(&arcbench(&["stats", "composition", "--in", bad.to_str().unwrap()])), 1);
}

#[test]
fn replayed_experiment_is_deterministic() {
    let plan = fixture().join("plan.toml");
    let log = fixture().join("exchanges.jsonl");
    let expected = fs::read_to_string(fixture().join("expected/report.txt")).unwrap();
    let mut reports = Vec::new();
    for _ in 0..2 {
        let out = tempfile::tempdir().unwrap();
        let args = ["experiment", "run", "--plan", plan.to_str().unwrap(), "--backend", "replay", "--replay-log", log.to_str().unwrap(), "--out"];
        let o = arcbench(&[&args[..], &[out.path().to_str().unwrap()]].concat());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let dir = out.path().join("replay-fixture");
        let report = fs::read_to_string(dir.join("report.txt")).unwrap();
        assert_eq!(report, expected);
        assert_eq!(fs::read(dir.join("summary.json")).unwrap(), fs::read(fixture().join("expected/summary.json")).unwrap());

        // `report` rebuilds the same files from the directory alone.
        fs::remove_file(dir.join("report.txt")).unwrap();
        let o = arcbench(&["report", "--experiment", "replay-fixture", "--out", out.path().to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(fs::read_to_string(dir.join("report.txt")).unwrap(), expected);
        reports.push(report);
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn replay_without_a_log_or_with_a_short_one() {
    let out = tempfile::tempdir().unwrap();
    let plan = fixture().join("plan.toml");
    let o = arcbench(&["experiment", "run", "--plan", plan.to_str().unwrap(), "--backend", "replay", "--out", out.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let short = write(out.path(), "short.jsonl", "");
    let o = arcbench(&[
        "experiment", "run", "--plan", plan.to_str().unwrap(), "--backend", "replay", "--replay-log", short.to_str().unwrap(), "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2, "{o:?}");
    assert!(String::from_utf8_lossy(&o.stderr).contains("error:"));
}

#[test]
fn task_validation_exit_codes() {
    let o = arcbench(&["tasks", "validate", fixture().join("tasks").to_str().unwrap()]);
    assert_eq!((code(&o), stdout(&o)), (0, "5 tasks valid (0 change grid size)\n".to_string()));

    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "0a0a0a0a.json", r#"{"train": [{"input": [[1]], "output": [[1]]}], "test": [{"input": [[1]], "output": [[12]]}]}"#);
    write(dir.path(), "0b0b0b0b.json", r#"{"train": [], "test": []}"#);
    write(dir.path(), "0c0c0c0c.json", r#"{"train": [{"input": [[1]], "output": [[1, 1]]}], "test": [{"input": [[2]], "output": [[2, 2]]}]}"#);
    let o = arcbench(&["tasks", "validate", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("2 of 3 tasks invalid") && err.contains("0a0a0a0a.json") && err.contains("0b0b0b0b.json"), "{err}");

    assert_eq!(code(&arcbench(&["tasks", "validate", dir.path().join("missing").to_str().unwrap()])), 2);
    assert_eq!(code(&arcbench(&["no-such-command"])), 2);
}

#[test]
fn alpha_distribution_and_validity() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.csv", "# subject, rater a, rater b\n1, 1\n1, 0\n0 1\n0 0\n");
    let o = arcbench(&["stats", "alpha", "--in", m.to_str().unwrap()]);
    assert_eq!(stdout(&o), "alpha = 0.0000 (4 subjects, 2 raters)\n");
    let flat = write(dir.path(), "flat.csv", "1,1\n1,1\n");
    assert_eq!(code(&arcbench(&["stats", "alpha", "--in", flat.to_str().unwrap()])), 1);

    let records = fixture().join("expected/records.jsonl");
    let o = arcbench(&["stats", "distribution", "--in", records.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("5 tasks\n"), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 12);
}

const CONCEPT_TASK: &str = r#"{"train": [{"input": [[1, 0], [0, 0]], "output": [[0, 0], [0, 1]]}], "test": [{"input": [[2, 0], [0, 0]], "output": [[0, 0], [0, 2]]}]}"#;

#[test]
fn itp_generate_then_validity() {
    let dir = tempfile::tempdir().unwrap();
    let tasks = dir.path().join("concept");
    write(&tasks, "Center/Center1.json", CONCEPT_TASK);
    write(&tasks, "Center/Center2.json", CONCEPT_TASK);
    write(&tasks, "Copy/Copy1.json", CONCEPT_TASK);
    let out = dir.path().join("reports");
    let o = arcbench(&["itp", "generate", "--tasks", tasks.to_str().unwrap(), "--category", "Center", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let gens = out.join("itp-Center/generations.jsonl");
    let lines = fs::read_to_string(&gens).unwrap();
    assert!(lines.lines().all(|l| l.contains("\"category\":\"Center\"")));
    let o = arcbench(&["stats", "validity", "--in", gens.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().any(|l| l.starts_with("Center")), "{}", stdout(&o));

    let o = arcbench(&["itp", "generate", "--tasks", tasks.to_str().unwrap(), "--category", "Nope", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn serve_answers_http() {
    let dir = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_arcbench"))
        .args(["serve", "--addr", "127.0.0.1:0", "--tasks", fixture().join("tasks").to_str().unwrap()])
        .args(["--data", dir.path().join("data").to_str().unwrap(), "--reports", dir.path().join("reports").to_str().unwrap()])
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("serving on http://").unwrap_or_else(|| panic!("{line}")).to_string();

    let mut s = TcpStream::connect(&addr).unwrap();
    write!(s, "GET /tasks HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n").unwrap();
    let mut resp = String::new();
    s.read_to_string(&mut resp).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains("\"1a2b3c4d\""), "{resp}");
}
