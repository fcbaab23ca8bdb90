//! Episode loop: reset, then query policies and step until termination or
//! the horizon.
//!
//! All randomness for an episode comes from a single [`RngStream`]. Reset,
//! each step `t`, and each agent's policy draw from forks of it, so the
//! environment's draws at step `t` are the same no matter which policy is
//! being evaluated.

use std::collections::BTreeMap;

use thiserror::Error;

use super::trace::{EpisodeTrace, Outcome, StepRecord, TraceHeader, TraceOf};
use super::{step, AgentId, DomainAction, Environment, Policy, RngStream, StepError, StepResult};

const RESET_LABEL: u64 = 0x7265_7365_74;
const STEP_LABEL: u64 = 0x7374_6570;
const POLICY_LABEL: u64 = 0x706f_6c69_6379;

pub type PolicyMap<E> = BTreeMap<AgentId, Box<dyn Policy<E>>>;

#[derive(Debug, Error, PartialEq)]
pub enum RunError {
    #[error("no policy supplied for agent {0}")]
    MissingPolicy(AgentId),
    #[error("policy supplied for unknown agent {0}")]
    UnknownAgent(AgentId),
}

pub fn reset_stream(episode: &RngStream) -> RngStream {
    episode.fork(RESET_LABEL)
}

pub fn step_stream(episode: &RngStream, t: usize) -> RngStream {
    episode.fork(STEP_LABEL).fork(t as u64)
}

pub fn policy_stream(episode: &RngStream, agent: usize) -> RngStream {
    episode.fork(POLICY_LABEL).fork(agent as u64)
}

/// Runs one episode on `RngStream::new(seed, 0)`.
pub fn run_episode<E: Environment>(
    env: &E,
    policies: &mut PolicyMap<E>,
    seed: u64,
    max_steps: usize,
) -> Result<TraceOf<E>, RunError> {
    run_episode_on(env, policies, RngStream::new(seed, 0), max_steps, |_| {})
}

/// Runs one episode on an explicit stream, handing every step result to
/// `on_step` before it is folded into the trace.
pub fn run_episode_on<E: Environment>(
    env: &E,
    policies: &mut PolicyMap<E>,
    stream: RngStream,
    max_steps: usize,
    mut on_step: impl FnMut(&StepResult<E>),
) -> Result<TraceOf<E>, RunError> {
    let agents = env.agents();
    for id in agents {
        if !policies.contains_key(id) {
            return Err(RunError::MissingPolicy(id.clone()));
        }
    }
    if let Some(extra) = policies.keys().find(|id| env.agent_index(id).is_none()) {
        return Err(RunError::UnknownAgent(extra.clone()));
    }
    for p in policies.values_mut() {
        p.reset();
    }

    let config = env.config();
    let header = TraceHeader {
        domain: E::DOMAIN,
        config_digest: config.digest(),
        seed: stream.seed(),
        stream: stream.stream_id(),
        agents: agents.to_vec(),
        max_steps,
        config,
    };
    let mut trace = EpisodeTrace {
        header,
        steps: Vec::new(),
        cumulative: agents.iter().map(|a| (a.clone(), 0.0)).collect(),
        outcome: Outcome::Truncated,
    };

    let (mut state, mut observations) = env.reset(&mut reset_stream(&stream));
    if env.terminal(&state) {
        trace.outcome = Outcome::Terminated;
        return Ok(trace);
    }
    let mut policy_rngs: Vec<RngStream> =
        (0..agents.len()).map(|i| policy_stream(&stream, i)).collect();

    for t in 0..max_steps {
        let mut joint = BTreeMap::new();
        for (idx, id) in agents.iter().enumerate() {
            if !env.is_present(&state, idx) {
                continue;
            }
            let policy = policies.get_mut(id).expect("roster checked above");
            let a = policy.act(&observations[id], &mut policy_rngs[idx]);
            joint.insert(id.clone(), a);
        }

        let result = match step(env, &state, &joint, &mut step_stream(&stream, t)) {
            Ok(r) => r,
            Err(err) => {
                let agent = match &err {
                    StepError::IllegalAction { agent, .. } | StepError::MissingAction(agent) => {
                        agent.clone()
                    }
                    StepError::UnknownAgent(agent) => agent.clone(),
                    StepError::Terminated => agents[0].clone(),
                };
                trace.outcome = Outcome::Crashed {
                    t,
                    agent,
                    reason: err.to_string(),
                };
                return Ok(trace);
            }
        };
        on_step(&result);

        for (agent, r) in &result.rewards {
            *trace.cumulative.get_mut(agent).expect("reward arity") += r;
        }
        trace.steps.push(StepRecord {
            t,
            actions: result.actions,
            rewards: result.rewards,
            events: result.events,
        });
        state = result.next_state;
        observations = result.observations;
        if result.terminated {
            trace.outcome = Outcome::Terminated;
            break;
        }
    }
    Ok(trace)
}

/// Re-simulates a recorded trace from its header, checking that every step's
/// events and rewards match the recording. Returns the state after each step.
pub fn replay_states<E: Environment>(
    env: &E,
    trace: &TraceOf<E>,
) -> Result<(E::State, Vec<E::State>), (usize, String)> {
    let stream = RngStream::new(trace.header.seed, trace.header.stream);
    let (initial, _) = env.reset(&mut reset_stream(&stream));
    let mut state = initial.clone();
    let mut states = Vec::with_capacity(trace.steps.len());
    for rec in &trace.steps {
        let result = step(env, &state, &rec.actions, &mut step_stream(&stream, rec.t))
            .map_err(|e| (rec.t, e.to_string()))?;
        if result.events != rec.events {
            return Err((rec.t, "recorded events do not match re-simulation".into()));
        }
        if result.rewards != rec.rewards {
            return Err((rec.t, "recorded rewards do not match re-simulation".into()));
        }
        if result.actions != rec.actions {
            return Err((rec.t, "recorded joint action is incomplete".into()));
        }
        state = result.next_state;
        states.push(state.clone());
    }
    Ok((initial, states))
}

/// Count of each action class over every agent-step of a trace.
pub fn action_counts<E: Environment>(trace: &TraceOf<E>) -> BTreeMap<String, u64> {
    let mut counts: BTreeMap<String, u64> =
        E::action_classes().iter().map(|c| (c.to_string(), 0)).collect();
    for s in &trace.steps {
        for a in s.actions.values() {
            *counts.entry(a.class().to_string()).or_insert(0) += 1;
        }
    }
    counts
}
