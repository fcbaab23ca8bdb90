//! Batch summaries: means with standard errors, action proportions, and the
//! per-step reward curve.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::batch::{BatchResult, EpisodeRecord};
use crate::config::Domain;

/// Running count, mean and sum of squared deviations; mergeable.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &Moments) -> Moments {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }

    pub fn estimate(&self) -> Estimate {
        if self.n < 2 {
            return Estimate {
                mean: if self.n == 0 { 0.0 } else { self.mean },
                std_error: 0.0,
                n: self.n,
                std_error_defined: false,
            };
        }
        let var = self.m2 / (self.n - 1) as f64;
        Estimate {
            mean: self.mean,
            std_error: (var / self.n as f64).sqrt(),
            n: self.n,
            std_error_defined: true,
        }
    }
}

/// A sample mean with its standard error (sample sd / sqrt(n)). With fewer
/// than two samples the error is reported as 0 and flagged undefined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub std_error_defined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub domain: Domain,
    pub config_digest: String,
    pub policy: String,
    pub episodes: usize,
    pub crashes: usize,
    /// Cumulative team reward over non-crashed episodes.
    pub reward: Estimate,
    /// Share of agent-steps per action class.
    pub action_proportions: BTreeMap<String, f64>,
    pub metrics: BTreeMap<String, Estimate>,
}

/// Partial aggregate over a subset of episodes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Accumulator {
    pub episodes: usize,
    pub crashes: usize,
    pub reward: Moments,
    pub action_counts: BTreeMap<String, u64>,
    pub metrics: BTreeMap<String, Moments>,
}

impl Accumulator {
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a EpisodeRecord>) -> Self {
        let mut acc = Accumulator::default();
        for r in records {
            acc.push(r);
        }
        acc
    }

    pub fn push(&mut self, r: &EpisodeRecord) {
        self.episodes += 1;
        for (class, c) in &r.action_counts {
            *self.action_counts.entry(class.clone()).or_insert(0) += c;
        }
        if r.crashed {
            self.crashes += 1;
            return;
        }
        self.reward.push(r.cumulative_reward);
        for (k, v) in &r.metrics {
            self.metrics.entry(k.clone()).or_default().push(*v);
        }
    }

    pub fn merge(&self, other: &Accumulator) -> Accumulator {
        let mut action_counts = self.action_counts.clone();
        for (k, c) in &other.action_counts {
            *action_counts.entry(k.clone()).or_insert(0) += c;
        }
        let mut metrics = self.metrics.clone();
        for (k, m) in &other.metrics {
            let merged = metrics.get(k).copied().unwrap_or_default().merge(m);
            metrics.insert(k.clone(), merged);
        }
        Accumulator {
            episodes: self.episodes + other.episodes,
            crashes: self.crashes + other.crashes,
            reward: self.reward.merge(&other.reward),
            action_counts,
            metrics,
        }
    }

    pub fn proportions(&self) -> BTreeMap<String, f64> {
        let total: u64 = self.action_counts.values().sum();
        self.action_counts
            .iter()
            .map(|(k, &c)| {
                let p = if total == 0 {
                    // No agent ever acted: count the batch as entirely idle.
                    if k == "noop" { 1.0 } else { 0.0 }
                } else {
                    c as f64 / total as f64
                };
                (k.clone(), p)
            })
            .collect()
    }
}

pub fn aggregate(batch: &BatchResult) -> MetricSummary {
    let acc = Accumulator::from_records(&batch.records);
    finish(batch, &acc)
}

/// Turns an accumulator into a summary labelled with `batch`'s header.
pub fn finish(batch: &BatchResult, acc: &Accumulator) -> MetricSummary {
    MetricSummary {
        domain: batch.header.domain,
        config_digest: batch.header.config_digest.clone(),
        policy: batch.header.policy.clone(),
        episodes: acc.episodes,
        crashes: acc.crashes,
        reward: acc.reward.estimate(),
        action_proportions: acc.proportions(),
        metrics: acc.metrics.iter().map(|(k, m)| (k.clone(), m.estimate())).collect(),
    }
}

/// Mean team reward at each step across non-crashed episodes; step `t`
/// averages only the episodes that lasted past `t`.
pub fn reward_over_time(batch: &BatchResult) -> Vec<(usize, f64)> {
    let mut sums: Vec<Moments> = Vec::new();
    for r in batch.records.iter().filter(|r| !r.crashed) {
        if sums.len() < r.reward_series.len() {
            sums.resize(r.reward_series.len(), Moments::default());
        }
        for (t, &v) in r.reward_series.iter().enumerate() {
            sums[t].push(v);
        }
    }
    sums.iter().enumerate().map(|(t, m)| (t, m.mean)).collect()
}
