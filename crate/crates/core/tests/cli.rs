use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pom"))
        .args(args)
        .env_remove("POM_API_KEY")
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = pom(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    pom(args).status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_replay_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&["run", "--preset", "svo-main", "--backend", "scripted", "--seed", "7", "--out", s(dir.path())]);
    assert!(out.contains("after") && out.contains("rounds"), "{out}");
    let log = dir.path().join("svo-main/7.jsonl");
    let replay = ok(&["replay", "--in", s(&log)]);
    assert!(replay.starts_with("OK, digests match"), "{replay}");
    ok(&["validate", "--kind", "record", "--config", s(&log)]);

    let text = fs::read_to_string(&log).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mid = lines.len() / 2;
    lines[mid] = lines[mid].replacen("\"round\":", "\"round\":1", 1);
    fs::write(&log, lines.join("\n") + "\n").unwrap();
    let c = code(&["replay", "--in", s(&log)]);
    assert!(c == 5 || c == 3, "exit {c}");
}

#[test]
fn sweep_then_analyze_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let res = dir.path().join("res");
    let out = ok(&["sweep", "--preset", "leadership-vanilla-15", "--backend", "scripted", "--runs", "6", "--jobs", "2", "--out", s(&res)]);
    assert!(out.contains("6 played"), "{out}");
    assert_eq!(fs::read_dir(res.join("leadership-vanilla-15")).unwrap().filter(|e| {
        e.as_ref().unwrap().path().extension().is_some_and(|x| x == "jsonl")
    }).count(), 6);
    assert!(res.join("leadership-vanilla-15/aggregate.csv").exists());

    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let first = ok(&["analyze", "--in", s(&res), "--out", s(&a)]);
    let second = ok(&["analyze", "--in", s(&res), "--out", s(&b)]);
    assert_eq!(first, second);
    let mut names: Vec<String> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert!(names.contains(&"table.csv".to_string()), "{names:?}");
    assert!(names.iter().any(|n| n.starts_with("heatmap")), "{names:?}");
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n}");
    }

    let heat = ok(&["analyze", "--in", s(&res), "--out", s(&a), "--report", "heatmap"]);
    assert!(heat.contains("leader"), "{heat}");
}

#[test]
fn analyze_against_adds_p_values() {
    let dir = tempfile::tempdir().unwrap();
    let on = dir.path().join("on");
    let off = dir.path().join("off");
    ok(&["sweep", "--preset", "svo-main", "--backend", "scripted", "--runs", "4", "--out", s(&on)]);
    ok(&["sweep", "--preset", "svo-no-meeting", "--backend", "scripted", "--runs", "4", "--out", s(&off)]);
    let o = dir.path().join("o");
    ok(&["analyze", "--in", s(&on), "--against", s(&off), "--out", s(&o)]);
    let cmp = fs::read_to_string(o.join("compare.csv")).unwrap();
    assert!(cmp.lines().count() > 1, "{cmp}");
}

#[test]
fn mock_backend_runs_offline() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["run", "--preset", "svo-main", "--backend", "mock", "--seed", "2", "--out", s(dir.path())]);
    ok(&["replay", "--in", s(&dir.path().join("svo-main/2.jsonl"))]);
}

#[test]
fn validate_configs() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(&good, r#"{"name":"x","roster":{"mode":"fixed","personas":[
        {"id":"a","kind":"svo","angle":0},{"id":"b","kind":"svo","angle":0},{"id":"c","kind":"svo","angle":0},
        {"id":"d","kind":"svo","angle":0},{"id":"e","kind":"svo","angle":0}]},"backend":"scripted","repetitions":2}"#).unwrap();
    ok(&["validate", "--config", s(&good)]);
    ok(&["sweep", "--config", s(&good), "--out", s(&dir.path().join("r"))]);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"name":"x","roster":{"mode":"fixed","personas":[]},"colour":1}"#).unwrap();
    let o = pom(&["validate", "--config", s(&bad)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));

    let short = dir.path().join("short.json");
    fs::write(&short, r#"{"name":"x","roster":{"mode":"fixed","personas":[{"id":"a","kind":"svo","angle":0}]}}"#).unwrap();
    assert_eq!(code(&["validate", "--config", s(&short)]), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = s(dir.path());
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["fly"]), 2);
    assert_eq!(code(&["run", "--preset", "nope", "--backend", "scripted", "--out", out]), 2);
    assert_eq!(code(&["run", "--preset", "svo-main", "--config", "x.json", "--out", out]), 2);
    assert_eq!(code(&["run", "--preset", "svo-main", "--backend", "llm", "--out", out]), 4);
    assert_eq!(code(&["replay", "--in", "/nonexistent/1.jsonl"]), 6);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["--help"]), 0);
}
