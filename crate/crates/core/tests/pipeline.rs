use openmas::cyber::{Cyber, CyberConfig};
use openmas::eval::batch::{run_batch, BatchResult};
use openmas::eval::stats::{finish, Accumulator};
use openmas::eval::{aggregate, reward_over_time, run_batch_config, run_single, significance_matrix, EvalError, PairCell};
use openmas::posg::runner::{reset_stream, step_stream};
use openmas::posg::{derive_stream, Environment};
use openmas::report::render::{render_svgs, render_text, RenderError};
use openmas::wildfire::{Wildfire, WildfireConfig};
use openmas::{parse_config, ConfigError, Domain, EnvConfig};

fn wildfire() -> Wildfire {
    Wildfire::new(WildfireConfig::default()).unwrap()
}

fn fake(policy: &str, rewards: &[f64]) -> BatchResult {
    let mut b = run_batch(&wildfire(), "noop", rewards.len(), 1).unwrap();
    b.header.policy = policy.into();
    for (r, &v) in b.records.iter_mut().zip(rewards) {
        r.cumulative_reward = v;
    }
    b
}

#[test]
fn default_batch_has_256_ordered_records() {
    let b = run_batch(&wildfire(), "random", 256, 42).unwrap();
    assert_eq!(b.records.len(), 256);
    for (i, r) in b.records.iter().enumerate() {
        assert_eq!(r.index, i);
        let s = derive_stream(42, i as u64);
        assert_eq!((r.seed, r.stream), (s.seed(), s.stream_id()));
    }
}

#[test]
fn batches_are_deterministic_and_round_trip() {
    let env = Cyber::new(CyberConfig::default()).unwrap();
    let a = run_batch(&env, "patched", 12, 9).unwrap();
    let b = run_batch(&env, "patched", 12, 9).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_jsonl(), b.to_jsonl());
    assert_eq!(BatchResult::from_jsonl(&a.to_jsonl()).unwrap(), a);
}

#[test]
fn corrupt_batch_file_names_the_line() {
    let text = run_batch(&wildfire(), "noop", 3, 1).unwrap().to_jsonl();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[2] = "{not json";
    match BatchResult::from_jsonl(&lines.join("\n")) {
        Err(EvalError::Corrupt { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
}

#[test]
fn single_episode_batch_flags_degenerate_error() {
    let b = run_batch(&wildfire(), "smallest", 1, 3).unwrap();
    assert!(b.header.degenerate_sample);
    let s = aggregate(&b);
    assert_eq!(s.reward.std_error, 0.0);
    assert!(!s.reward.std_error_defined);
}

#[test]
fn unknown_policy_and_empty_batch_are_errors() {
    assert!(matches!(run_batch(&wildfire(), "patched", 4, 0), Err(EvalError::UnknownPolicy { .. })));
    assert!(matches!(run_batch(&wildfire(), "noop", 0, 0), Err(EvalError::Empty)));
}

#[test]
fn noop_batches_are_all_noop() {
    for d in Domain::ALL {
        let s = aggregate(&run_batch_config(&EnvConfig::default_for(d), "noop", 8, 5).unwrap());
        for (class, p) in &s.action_proportions {
            assert_eq!(*p, if class == "noop" { 1.0 } else { 0.0 }, "{d} {class}");
        }
    }
    let s = aggregate(&run_batch(&wildfire(), "noop", 16, 5).unwrap());
    assert_eq!(s.metrics["fires_extinguished"].mean, 0.0);
}

#[test]
fn aggregation_of_halves_matches_whole() {
    let b = run_batch(&wildfire(), "random", 40, 11).unwrap();
    let whole = aggregate(&b);
    let (left, right) = b.records.split_at(17);
    let merged = finish(&b, &Accumulator::from_records(left).merge(&Accumulator::from_records(right)));
    assert_eq!(merged.episodes, whole.episodes);
    assert!((merged.reward.mean - whole.reward.mean).abs() < 1e-9);
    assert!((merged.reward.std_error - whole.reward.std_error).abs() < 1e-9);
    for (k, v) in &whole.metrics {
        assert!((merged.metrics[k].mean - v.mean).abs() < 1e-9, "{k}");
        assert!((merged.metrics[k].std_error - v.std_error).abs() < 1e-9, "{k}");
    }
    assert_eq!(merged.action_proportions, whole.action_proportions);
}

#[test]
fn environment_randomness_is_shared_across_policies() {
    let env = wildfire();
    let ep = derive_stream(42, 3);
    let (a, _) = env.reset(&mut reset_stream(&ep));
    let (b, _) = env.reset(&mut reset_stream(&ep));
    assert_eq!(a, b);
    assert_eq!(step_stream(&ep, 4), step_stream(&ep, 4));
    assert_ne!(step_stream(&ep, 4), step_stream(&ep, 5));
}

#[test]
fn self_comparison_is_not_significant() {
    let b = fake("a", &[1.0, 2.0, 3.0]);
    let m = significance_matrix(&[&b, &b], 0.05).unwrap();
    assert_eq!(m.cells[0][0], PairCell::Diagonal);
    assert_eq!(m.cells[0][1], PairCell::NoInformation);
    assert!(!m.cells[0][1].significant());
}

#[test]
fn disjoint_supports_are_significant() {
    let hi: Vec<f64> = (0..20).map(|i| 100.0 + i as f64).collect();
    let lo: Vec<f64> = (0..20).map(|i| i as f64 * 0.5).collect();
    let (a, b) = (fake("hi", &hi), fake("lo", &lo));
    let m = significance_matrix(&[&a, &b], 0.05).unwrap();
    assert!(m.cells[0][1].significant());
    assert_eq!(m.cells[0][1], m.cells[1][0]);
    let none = significance_matrix(&[&a, &b], 0.0).unwrap();
    assert!(!none.cells[0][1].significant());
}

#[test]
fn mismatched_configs_are_refused() {
    let a = run_batch(&wildfire(), "noop", 4, 1).unwrap();
    let other = Wildfire::new(WildfireConfig { p_spread: 0.2, ..WildfireConfig::default() }).unwrap();
    let b = run_batch(&other, "noop", 4, 1).unwrap();
    assert!(matches!(significance_matrix(&[&a, &b], 0.05), Err(EvalError::Mismatch(_))));
    let c = run_batch(&wildfire(), "random", 4, 2).unwrap();
    assert!(matches!(significance_matrix(&[&a, &c], 0.05), Err(EvalError::Mismatch(_))));
}

#[test]
fn reward_curve_edge_cases() {
    let mut b = run_batch(&wildfire(), "noop", 3, 1).unwrap();
    for r in &mut b.records {
        r.reward_series = vec![1.0, -2.0, 3.0];
    }
    assert_eq!(reward_over_time(&b), vec![(0, 1.0), (1, -2.0), (2, 3.0)]);
    b.records[0].reward_series = vec![4.0];
    assert_eq!(reward_over_time(&b)[0], (0, 2.0));
    assert_eq!(reward_over_time(&b)[1], (1, -2.0));
    let single = run_batch(&wildfire(), "random", 1, 8).unwrap();
    let curve: Vec<f64> = reward_over_time(&single).into_iter().map(|p| p.1).collect();
    assert_eq!(curve, single.records[0].reward_series);
}

#[test]
fn unopposed_attackers_degrade_the_network() {
    let env = Cyber::new(CyberConfig::default()).unwrap();
    let curve = reward_over_time(&run_batch(&env, "noop", 64, 42).unwrap());
    let n = curve.len() as f64;
    let mean_t = curve.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let mean_r = curve.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = curve.iter().map(|p| (p.0 as f64 - mean_t) * (p.1 - mean_r)).sum();
    assert!(cov < 0.0, "fitted slope should be negative");
    assert!(curve.last().unwrap().1 < curve[0].1);
}

#[test]
fn shipped_configs_load_from_disk() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("src");
    let cfg = parse_config(root.join("wildfire/configs/default.toml")).unwrap();
    assert_eq!(cfg.digest(), parse_config(root.join("wildfire/configs/default.toml")).unwrap().digest());
    assert_eq!(cfg, EnvConfig::default_for(Domain::Wildfire));
    for (domain, dir, names) in [
        (Domain::Wildfire, "wildfire", &["ws1", "ws2", "ws3"][..]),
        (Domain::Cybersecurity, "cyber", &["default", "cs1", "cs2", "cs3"][..]),
        (Domain::Rideshare, "rideshare", &["default", "low_arrival", "high_arrival"][..]),
    ] {
        for n in names {
            let c = parse_config(root.join(format!("{dir}/configs/{n}.toml"))).unwrap();
            assert_eq!(c.domain(), domain);
            for p in openmas::eval::policy_names(domain) {
                run_batch_config(&c, p, 2, 0).unwrap();
            }
        }
    }
}

#[test]
fn config_json_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let cfg = EnvConfig::default_for(Domain::Cybersecurity);
    std::fs::write(&path, cfg.canonical_text()).unwrap();
    assert_eq!(parse_config(&path).unwrap(), cfg);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "domain = \"cybersecurity\"\nnodes = 2\nedges = [[0, 5]]\ninitial_states = [2, 2]\n").unwrap();
    let err = parse_config(&bad).unwrap_err();
    assert_eq!(err.field(), Some("edges[0]"));
    assert!(matches!(parse_config(dir.path().join("missing.toml")), Err(ConfigError::Io(_))));
}

#[test]
fn rendering_round_trips_recorded_runs() {
    for d in Domain::ALL {
        let cfg = EnvConfig::default_for(d);
        let policy = showcase_policy(d);
        let (replay, summary) = run_single(&cfg, policy, 42).unwrap();
        let text = render_text(&replay).unwrap();
        assert!(text.trim_end().ends_with(&format!("steps: {}", summary.length)), "{d}");
        assert_eq!(render_svgs(&replay).unwrap().len(), summary.length);
    }
}

fn showcase_policy(d: Domain) -> &'static str {
    match d {
        Domain::Wildfire => "smallest",
        Domain::Cybersecurity => "patched",
        Domain::Rideshare => "greedy",
    }
}

#[test]
fn wildfire_text_frames_use_digits_and_letters() {
    let (replay, _) = run_single(&EnvConfig::default_for(Domain::Wildfire), "noop", 1).unwrap();
    let text = render_text(&replay).unwrap();
    let first: Vec<&str> = text.lines().skip(1).take(5).collect();
    assert_eq!(first, vec![". . 2 . .", ". A . B .", ". . 3 . .", ". . C . .", ". 1 . . ."]);
}

#[test]
fn corrupt_replays_name_the_first_bad_line() {
    let (replay, _) = run_single(&EnvConfig::default_for(Domain::Wildfire), "random", 4).unwrap();
    let mut lines: Vec<String> = replay.lines().map(String::from).collect();
    lines[3] = lines[3].replace("\"t\":2", "\"t\":7");
    match render_text(&lines.join("\n")) {
        Err(RenderError::Corrupt { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    let mut lines: Vec<String> = replay.lines().map(String::from).collect();
    lines[2] = lines[2].replace("\"events\":[", "\"events\":[{\"event\":\"burnout\",\"fire\":0,\"position\":{\"y\":0,\"x\":2}},");
    match render_text(&lines.join("\n")) {
        Err(RenderError::Corrupt { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(matches!(render_text("garbage"), Err(RenderError::Corrupt { line: 1, .. })));
}
