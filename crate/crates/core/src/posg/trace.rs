//! Episode traces and their line-delimited JSON form.
//!
//! A trace file is one `header` line, one `step` line per step and a closing
//! `end` line. Each line is a JSON object whose `record` field names its kind.
//! Keys are emitted in sorted order, so equal traces serialize to equal bytes.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{AgentId, Environment};
use crate::config::{Domain, EnvConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub domain: Domain,
    pub config_digest: String,
    pub seed: u64,
    pub stream: u64,
    pub agents: Vec<AgentId>,
    pub max_steps: usize,
    pub config: EnvConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "A: Serialize, Ev: Serialize"))]
#[serde(bound(deserialize = "A: DeserializeOwned, Ev: DeserializeOwned"))]
pub struct StepRecord<A, Ev> {
    pub t: usize,
    pub actions: BTreeMap<AgentId, A>,
    pub rewards: BTreeMap<AgentId, f64>,
    pub events: Vec<Ev>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    /// The environment reached a terminal state.
    Terminated,
    /// The step horizon ran out first.
    Truncated,
    /// A policy produced an action the environment rejected at step `t`.
    Crashed {
        t: usize,
        agent: AgentId,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEnd {
    pub length: usize,
    pub cumulative: BTreeMap<AgentId, f64>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeTrace<A, Ev> {
    pub header: TraceHeader,
    pub steps: Vec<StepRecord<A, Ev>>,
    pub cumulative: BTreeMap<AgentId, f64>,
    pub outcome: Outcome,
}

pub type TraceOf<E> = EpisodeTrace<<E as Environment>::Action, <E as Environment>::Event>;

#[derive(Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
#[serde(bound(serialize = "A: Serialize, Ev: Serialize"))]
#[serde(bound(deserialize = "A: DeserializeOwned, Ev: DeserializeOwned"))]
enum Line<A, Ev> {
    Header(TraceHeader),
    Step(StepRecord<A, Ev>),
    End(TraceEnd),
}

#[derive(Debug, Error, PartialEq)]
#[error("replay line {line}: {message}")]
pub struct ReplayError {
    /// 1-based line number of the first bad line.
    pub line: usize,
    pub message: String,
}

impl ReplayError {
    pub fn at(line: usize, message: impl Into<String>) -> Self {
        ReplayError {
            line,
            message: message.into(),
        }
    }
}

impl<A, Ev> EpisodeTrace<A, Ev>
where
    A: Serialize + DeserializeOwned + Clone,
    Ev: Serialize + DeserializeOwned + Clone,
{
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_crash(&self) -> bool {
        matches!(self.outcome, Outcome::Crashed { .. })
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        let mut push = |line: &Line<A, Ev>| {
            // Serializing plain data into a String cannot fail.
            out.push_str(&serde_json::to_string(line).expect("trace line serializes"));
            out.push('\n');
        };
        push(&Line::Header(self.header.clone()));
        for s in &self.steps {
            push(&Line::Step(s.clone()));
        }
        push(&Line::End(TraceEnd {
            length: self.steps.len(),
            cumulative: self.cumulative.clone(),
            outcome: self.outcome.clone(),
        }));
        out
    }

    /// Parses and structurally checks a trace: step indices are contiguous,
    /// the footer length matches, and cumulative rewards equal the step sums.
    pub fn from_jsonl(text: &str) -> Result<Self, ReplayError> {
        let mut header = None;
        let mut steps: Vec<StepRecord<A, Ev>> = Vec::new();
        let mut end = None;
        let mut last_line = 0;

        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            last_line = lineno;
            if raw.trim().is_empty() {
                continue;
            }
            if end.is_some() {
                return Err(ReplayError::at(lineno, "content after end record"));
            }
            let line: Line<A, Ev> =
                serde_json::from_str(raw).map_err(|e| ReplayError::at(lineno, e.to_string()))?;
            match line {
                Line::Header(h) => {
                    if header.is_some() {
                        return Err(ReplayError::at(lineno, "duplicate header"));
                    }
                    header = Some(h);
                }
                Line::Step(s) => {
                    if header.is_none() {
                        return Err(ReplayError::at(lineno, "step before header"));
                    }
                    if s.t != steps.len() {
                        return Err(ReplayError::at(
                            lineno,
                            format!("expected step {}, found {}", steps.len(), s.t),
                        ));
                    }
                    steps.push(s);
                }
                Line::End(e) => {
                    if header.is_none() {
                        return Err(ReplayError::at(lineno, "end before header"));
                    }
                    if e.length != steps.len() {
                        return Err(ReplayError::at(
                            lineno,
                            format!("footer length {} but {} steps", e.length, steps.len()),
                        ));
                    }
                    end = Some((lineno, e));
                }
            }
        }

        let header = header.ok_or_else(|| ReplayError::at(1, "missing header"))?;
        let (end_line, end) = end.ok_or_else(|| ReplayError::at(last_line + 1, "missing end record"))?;
        let trace = EpisodeTrace {
            header,
            steps,
            cumulative: end.cumulative,
            outcome: end.outcome,
        };
        if trace.summed_rewards() != trace.cumulative {
            return Err(ReplayError::at(
                end_line,
                "cumulative rewards differ from the sum of step rewards",
            ));
        }
        Ok(trace)
    }

    /// Per-agent sum of step rewards, accumulated in step order.
    pub fn summed_rewards(&self) -> BTreeMap<AgentId, f64> {
        let mut totals: BTreeMap<AgentId, f64> =
            self.header.agents.iter().map(|a| (a.clone(), 0.0)).collect();
        for s in &self.steps {
            for (agent, r) in &s.rewards {
                *totals.entry(agent.clone()).or_insert(0.0) += r;
            }
        }
        totals
    }
}

/// Reads only the header of a trace file, to learn its domain before a typed parse.
pub fn peek_header(text: &str) -> Result<TraceHeader, ReplayError> {
    let first = text
        .lines()
        .next()
        .ok_or_else(|| ReplayError::at(1, "empty replay"))?;
    #[derive(Deserialize)]
    struct Probe {
        record: String,
        #[serde(flatten)]
        rest: serde_json::Value,
    }
    let probe: Probe = serde_json::from_str(first).map_err(|e| ReplayError::at(1, e.to_string()))?;
    if probe.record != "header" {
        return Err(ReplayError::at(1, "first record is not a header"));
    }
    serde_json::from_value(probe.rest).map_err(|e| ReplayError::at(1, e.to_string()))
}
