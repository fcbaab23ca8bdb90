//! Seeded batch rollouts and their line-delimited JSON persistence.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::baselines::Baselines;
use crate::config::{Domain, EnvConfig};
use crate::posg::runner::{action_counts, run_episode_on, PolicyMap};
use crate::posg::trace::{Outcome, TraceOf};
use crate::posg::{derive_stream, Environment, RngStream};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchHeader {
    pub domain: Domain,
    pub config_digest: String,
    /// Short label for leaderboard columns, typically the config file stem.
    #[serde(default)]
    pub config_name: String,
    pub policy: String,
    pub n: usize,
    pub base_seed: u64,
    /// Set when `n < 2`, so standard errors are undefined.
    pub degenerate_sample: bool,
    pub config: EnvConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub index: usize,
    pub seed: u64,
    pub stream: u64,
    pub crashed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crash_reason: Option<String>,
    pub cumulative_reward: f64,
    pub length: usize,
    pub action_counts: BTreeMap<String, u64>,
    pub metrics: BTreeMap<String, f64>,
    /// Team reward at each step.
    pub reward_series: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BatchResult {
    pub header: BatchHeader,
    /// Ordered by episode index.
    pub records: Vec<EpisodeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
enum Line {
    Header(BatchHeader),
    Episode(EpisodeRecord),
}

impl BatchResult {
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&Line::Header(self.header.clone())).expect("serializable");
        out.push('\n');
        for r in &self.records {
            out.push_str(&serde_json::to_string(&Line::Episode(r.clone())).expect("serializable"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, EvalError> {
        let bad = |line: usize, message: String| EvalError::Corrupt { line, message };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let header = match lines.next() {
            Some((i, l)) => match serde_json::from_str(l).map_err(|e| bad(i + 1, e.to_string()))? {
                Line::Header(h) => h,
                Line::Episode(_) => return Err(bad(i + 1, "expected a header record".into())),
            },
            None => return Err(bad(1, "empty result file".into())),
        };
        let mut records = Vec::new();
        for (i, l) in lines {
            match serde_json::from_str(l).map_err(|e| bad(i + 1, e.to_string()))? {
                Line::Episode(r) => {
                    if r.index != records.len() {
                        return Err(bad(i + 1, format!("expected episode {}, found {}", records.len(), r.index)));
                    }
                    records.push(r);
                }
                Line::Header(_) => return Err(bad(i + 1, "duplicate header record".into())),
            }
        }
        if records.len() != header.n {
            return Err(bad(text.lines().count(), format!("header declares {} episodes, found {}", header.n, records.len())));
        }
        Ok(BatchResult { header, records })
    }

    /// The config name, or a digest prefix when unnamed.
    pub fn config_label(&self) -> String {
        if self.header.config_name.is_empty() {
            self.header.config_digest[..12].to_string()
        } else {
            self.header.config_name.clone()
        }
    }

    pub fn rewards(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.cumulative_reward).collect()
    }
}

/// One fresh instance of the named baseline per agent.
pub fn policy_map<E: Baselines + 'static>(env: &E, name: &str) -> Result<PolicyMap<E>, EvalError> {
    let mut map = PolicyMap::new();
    for id in env.agents() {
        let p = E::baseline(name).ok_or_else(|| EvalError::UnknownPolicy {
            domain: E::DOMAIN,
            name: name.to_string(),
            known: E::baseline_names().join(", "),
        })?;
        map.insert(id.clone(), p);
    }
    Ok(map)
}

/// Team reward of one step, taking agents in roster order.
pub fn team_reward<E: Environment>(env: &E, rewards: &BTreeMap<crate::posg::AgentId, f64>) -> f64 {
    let ordered: Vec<f64> = env.agents().iter().map(|a| rewards[a]).collect();
    E::team_reward(&ordered)
}

/// Runs one episode of `policy` on `stream`, returning the trace and the
/// domain metrics gathered along the way.
pub fn run_traced<E: Baselines + 'static>(
    env: &E,
    policy: &str,
    stream: RngStream,
) -> Result<(TraceOf<E>, BTreeMap<String, f64>), EvalError> {
    let mut policies = policy_map(env, policy)?;
    let mut metrics: BTreeMap<String, f64> =
        E::metric_names().iter().map(|m| (m.to_string(), 0.0)).collect();
    let trace = run_episode_on(env, &mut policies, stream, env.max_steps(), |r| {
        env.accumulate_metrics(r, &mut metrics)
    })?;
    Ok((trace, metrics))
}

fn record<E: Baselines + 'static>(env: &E, policy: &str, index: usize, base_seed: u64) -> Result<EpisodeRecord, EvalError> {
    let stream = derive_stream(base_seed, index as u64);
    let (seed, stream_id) = (stream.seed(), stream.stream_id());
    let run = catch_unwind(AssertUnwindSafe(|| run_traced(env, policy, stream)));
    let (trace, metrics) = match run {
        Ok(r) => r?,
        Err(panic) => {
            let reason = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "policy panicked".into());
            return Ok(EpisodeRecord {
                index,
                seed,
                stream: stream_id,
                crashed: true,
                crash_reason: Some(reason),
                cumulative_reward: 0.0,
                length: 0,
                action_counts: E::action_classes().iter().map(|c| (c.to_string(), 0)).collect(),
                metrics: BTreeMap::new(),
                reward_series: Vec::new(),
            });
        }
    };
    let reward_series: Vec<f64> = trace.steps.iter().map(|s| team_reward(env, &s.rewards)).collect();
    let crash_reason = match &trace.outcome {
        Outcome::Crashed { t, agent, reason } => Some(format!("step {t}, {agent}: {reason}")),
        _ => None,
    };
    Ok(EpisodeRecord {
        index,
        seed,
        stream: stream_id,
        crashed: crash_reason.is_some(),
        crash_reason,
        cumulative_reward: reward_series.iter().fold(0.0, |a, r| a + r),
        length: trace.len(),
        action_counts: action_counts::<E>(&trace),
        metrics,
        reward_series,
    })
}

/// Runs `n` episodes; episode `i` uses `derive_stream(base_seed, i)`.
/// Episodes run in parallel but records come back in index order.
pub fn run_batch<E: Baselines + 'static>(env: &E, policy: &str, n: usize, base_seed: u64) -> Result<BatchResult, EvalError> {
    if n == 0 {
        return Err(EvalError::Empty);
    }
    policy_map(env, policy)?;
    let records = (0..n)
        .into_par_iter()
        .map(|i| record(env, policy, i, base_seed))
        .collect::<Result<Vec<_>, _>>()?;
    let config = env.config();
    Ok(BatchResult {
        header: BatchHeader {
            domain: E::DOMAIN,
            config_digest: config.digest(),
            config_name: String::new(),
            policy: policy.to_string(),
            n,
            base_seed,
            degenerate_sample: n < 2,
            config,
        },
        records,
    })
}

/// Builds the environment for `config` and binds it to `$env` in `$body`.
#[macro_export]
macro_rules! with_env {
    ($config:expr, $env:ident => $body:expr) => {
        match $config {
            $crate::config::EnvConfig::Wildfire(c) => {
                let $env = $crate::wildfire::Wildfire::new(c.clone())?;
                $body
            }
            $crate::config::EnvConfig::Cybersecurity(c) => {
                let $env = $crate::cyber::Cyber::new(c.clone())?;
                $body
            }
            $crate::config::EnvConfig::Rideshare(c) => {
                let $env = $crate::rideshare::Rideshare::new(c.clone())?;
                $body
            }
        }
    };
}

pub fn run_batch_config(config: &EnvConfig, policy: &str, n: usize, base_seed: u64) -> Result<BatchResult, EvalError> {
    crate::with_env!(config, env => run_batch(&env, policy, n, base_seed))
}

pub fn policy_names(domain: Domain) -> &'static [&'static str] {
    match domain {
        Domain::Wildfire => crate::wildfire::Wildfire::baseline_names(),
        Domain::Cybersecurity => crate::cyber::Cyber::baseline_names(),
        Domain::Rideshare => crate::rideshare::Rideshare::baseline_names(),
    }
}

/// Summary of a single recorded episode.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpisodeSummary {
    pub length: usize,
    pub team_reward: f64,
    pub outcome: Outcome,
    pub metrics: BTreeMap<String, f64>,
}

/// Runs one episode on `RngStream::new(seed, 0)` and returns its replay text.
pub fn run_single(config: &EnvConfig, policy: &str, seed: u64) -> Result<(String, EpisodeSummary), EvalError> {
    crate::with_env!(config, env => {
        let (trace, metrics) = run_traced(&env, policy, RngStream::new(seed, 0))?;
        let team = trace.steps.iter().fold(0.0, |a, s| a + team_reward(&env, &s.rewards));
        let summary = EpisodeSummary {
            length: trace.len(),
            team_reward: team,
            outcome: trace.outcome.clone(),
            metrics,
        };
        Ok((trace.to_jsonl(), summary))
    })
}
