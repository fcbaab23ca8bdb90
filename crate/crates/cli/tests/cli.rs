use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn openmas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_openmas")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = openmas(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    openmas(args).status.code().unwrap()
}

fn config(domain: &str, name: &str) -> String {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/src");
    root.join(format!("{domain}/configs/{name}.toml")).to_string_lossy().into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn jsonl(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();
    files
}

#[test]
fn evaluate_writes_one_file_per_baseline_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["evaluate", "--domain", "wildfire", "--out", s(&a)]);
    ok(&["evaluate", "--domain", "wildfire", "--out", s(&b)]);
    let files = jsonl(&a);
    assert_eq!(files.len(), 4);
    for f in &files {
        let text = std::fs::read_to_string(f).unwrap();
        assert_eq!(text.lines().count(), 257, "header plus 256 records");
        assert_eq!(text, std::fs::read_to_string(b.join(f.file_name().unwrap())).unwrap());
    }
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["base_seed"], 42);
    assert_eq!(manifest["results"].as_array().unwrap().len(), 4);
}

#[test]
fn single_run_batches_are_flagged() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["evaluate", "--domain", "cybersecurity", "--policy", "noop", "--runs", "1", "--out", s(dir.path())]);
    let text = std::fs::read_to_string(dir.path().join("noop.jsonl")).unwrap();
    let header: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(header["degenerate_sample"], true);
}

#[test]
fn compare_builds_leaderboard_across_configs() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for name in ["ws1", "ws2", "ws3"] {
        let out = dir.path().join(name);
        ok(&["evaluate", "--config", &config("wildfire", name), "--runs", "24", "--out", s(&out)]);
        files.extend(jsonl(&out));
    }
    let report = dir.path().join("report");
    let mut args = vec!["compare".to_string(), "--out".into(), s(&report).into()];
    args.extend(files.iter().map(|f| s(f).to_string()));
    let stdout = ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(stdout.contains("ws1: "));

    let mut reader = csv::Reader::from_path(report.join("leaderboard.csv")).unwrap();
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers.len(), 1 + 2 * 3 + 2);
    assert_eq!(reader.records().count(), 4);

    let mut reader = csv::Reader::from_path(report.join("significance.csv")).unwrap();
    assert_eq!(reader.records().count(), 3 * 6);
    for f in ["summary.json", "activity.csv", "reward_over_time.csv", "rewards.svg", "activity.svg", "reward_over_time.svg"] {
        assert!(report.join(f).is_file(), "{f}");
    }
}

#[test]
fn compare_with_one_policy_has_no_pairs() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["evaluate", "--domain", "rideshare", "--policy", "greedy", "--runs", "8", "--out", s(dir.path())]);
    let report = dir.path().join("report");
    ok(&["compare", "--out", s(&report), s(&dir.path().join("greedy.jsonl"))]);
    let mut reader = csv::Reader::from_path(report.join("significance.csv")).unwrap();
    assert_eq!(reader.records().count(), 0);
}

#[test]
fn compare_refuses_mismatched_configs_under_one_label() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    ok(&["evaluate", "--domain", "wildfire", "--policy", "noop", "--runs", "4", "--out", s(&a)]);
    let alt = dir.path().join("default.toml");
    let text = std::fs::read_to_string(config("wildfire", "default")).unwrap();
    std::fs::write(&alt, text.replace("max_steps = 100", "max_steps = 30")).unwrap();
    ok(&["evaluate", "--config", s(&alt), "--policy", "random", "--runs", "4", "--out", s(&b)]);
    let out = openmas(&["compare", "--out", s(&dir.path().join("r")), s(&a.join("noop.jsonl")), s(&b.join("random.jsonl"))]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn noop_run_never_earns_positive_reward() {
    for domain in ["wildfire", "cybersecurity", "rideshare"] {
        let line = ok(&["run", "--domain", domain, "--policy", "noop", "--seed", "5"]);
        let summary: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
        assert!(summary["team_reward"].as_f64().unwrap() <= 0.0, "{domain}: {summary}");
    }
}

#[test]
fn recorded_runs_render_as_text_and_vector() {
    let dir = tempfile::tempdir().unwrap();
    let replay = dir.path().join("run.jsonl");
    let line = ok(&["run", "--domain", "rideshare", "--policy", "greedy", "--seed", "3", "--record", s(&replay)]);
    let summary: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    let steps = summary["length"].as_u64().unwrap() as usize;

    let text = ok(&["render", s(&replay)]);
    assert!(text.trim_end().ends_with(&format!("steps: {steps}")));
    let frames = dir.path().join("frames");
    ok(&["render", s(&replay), "--mode", "vector", "--out", s(&frames)]);
    assert_eq!(std::fs::read_dir(&frames).unwrap().count(), steps);
    assert!(frames.join("step_0001.svg").is_file());
}

#[test]
fn exit_codes_distinguish_failure_kinds() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["run"]), 1);
    assert_eq!(code(&["run", "--domain", "wildfire", "--policy", "patched"]), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "domain = \"wildfire\"\np_spread = 3.0\n").unwrap();
    assert_eq!(code(&["run", "--config", s(&bad)]), 2);
    assert_eq!(code(&["run", "--config", s(&dir.path().join("missing.toml"))]), 3);
    assert_eq!(code(&["render", s(&dir.path().join("missing.jsonl"))]), 3);
}
