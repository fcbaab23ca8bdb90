//! The environment contract shared by every domain.
//!
//! A domain is a value implementing [`Environment`]: it owns its validated
//! configuration and exposes pure functions over its state type. [`step`]
//! drives one transition through the fixed
//! transition → reward → observation → termination pipeline and enforces the
//! action-legality and terminal-state contracts.

pub mod rng;
pub mod runner;
pub mod trace;

use std::collections::BTreeMap;
use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Domain, EnvConfig};
pub use rng::{derive_stream, mix64, RngStream};

/// Name of an agent, unique within an episode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AgentId(String);

impl AgentId {
    pub fn new(name: impl Into<String>) -> Result<Self, EmptyAgentId> {
        let name = name.into();
        if name.is_empty() {
            Err(EmptyAgentId)
        } else {
            Ok(AgentId(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Error)]
#[error("agent ids must be non-empty")]
pub struct EmptyAgentId;

impl TryFrom<String> for AgentId {
    type Error = EmptyAgentId;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        AgentId::new(value)
    }
}

impl From<AgentId> for String {
    fn from(id: AgentId) -> String {
        id.0
    }
}

impl Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Identifier of a task (fire, subnetwork, passenger) within one episode.
pub type TaskId = u32;

/// One action per agent; the `a` consumed by a transition.
pub type JointAction<A> = BTreeMap<AgentId, A>;

/// Actions are plain `Copy` values with a stable textual form such as
/// `fight_2` or `move_0`. The prefix before the first `_` is the action class
/// used for action-distribution metrics.
pub trait DomainAction:
    Copy + Eq + Ord + Debug + Display + FromStr + Serialize + DeserializeOwned + Send + Sync + 'static
{
    fn noop() -> Self;
    fn class(&self) -> &'static str;
}

/// A partially observable stochastic game with a fixed agent roster.
///
/// Agent-indexed slices (`actions`, rewards, observations) follow the order of
/// [`Environment::agents`].
pub trait Environment: Sync {
    type State: Clone + PartialEq + Debug + Send;
    type Action: DomainAction;
    type Observation: Clone + PartialEq + Debug + Serialize;
    type Event: Clone + PartialEq + Debug + Serialize + DeserializeOwned + Send + Sync;

    const DOMAIN: Domain;

    fn config(&self) -> EnvConfig;
    fn agents(&self) -> &[AgentId];
    fn max_steps(&self) -> usize;

    fn initial_state(&self, rng: &mut RngStream) -> Self::State;
    fn is_present(&self, state: &Self::State, agent: usize) -> bool;
    fn legal_actions(&self, state: &Self::State, agent: usize) -> Vec<Self::Action>;
    fn transition(
        &self,
        state: &Self::State,
        actions: &[Self::Action],
        rng: &mut RngStream,
    ) -> (Self::State, Vec<Self::Event>);
    fn reward(&self, events: &[Self::Event], next: &Self::State) -> Vec<f64>;
    fn observe(&self, state: &Self::State, actions: &[Self::Action]) -> Vec<Self::Observation>;
    fn terminal(&self, state: &Self::State) -> bool;

    /// Legal actions as implied by an observation alone; what policies use.
    fn observed_legal_actions(obs: &Self::Observation) -> Vec<Self::Action>;

    /// The scalar a team is scored on for one step.
    fn team_reward(rewards: &[f64]) -> f64;

    fn action_classes() -> &'static [&'static str];

    /// Names of the per-episode domain metrics folded by `accumulate_metrics`.
    fn metric_names() -> &'static [&'static str];

    fn accumulate_metrics(&self, result: &StepResult<Self>, acc: &mut BTreeMap<String, f64>)
    where
        Self: Sized;

    fn agent_index(&self, agent: &AgentId) -> Option<usize> {
        self.agents().iter().position(|a| a == agent)
    }

    fn reset(&self, rng: &mut RngStream) -> (Self::State, BTreeMap<AgentId, Self::Observation>) {
        let state = self.initial_state(rng);
        let noops = vec![Self::Action::noop(); self.agents().len()];
        let obs = self.observe(&state, &noops);
        let obs = self.agents().iter().cloned().zip(obs).collect();
        (state, obs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult<E: Environment> {
    pub next_state: E::State,
    /// The joint action actually applied, with absent agents filled by noop.
    pub actions: JointAction<E::Action>,
    pub rewards: BTreeMap<AgentId, f64>,
    pub observations: BTreeMap<AgentId, E::Observation>,
    pub terminated: bool,
    pub events: Vec<E::Event>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("step called on a terminated state")]
    Terminated,
    #[error("agent {agent} chose illegal action {action}")]
    IllegalAction { agent: AgentId, action: String },
    #[error("no action supplied for present agent {0}")]
    MissingAction(AgentId),
    #[error("action supplied for unknown agent {0}")]
    UnknownAgent(AgentId),
}

/// Advance `state` by one joint action.
///
/// Absent agents may be omitted from `action` (or given noop); they are
/// assigned noop. Present agents must pick from their legal set.
pub fn step<E: Environment>(
    env: &E,
    state: &E::State,
    action: &JointAction<E::Action>,
    rng: &mut RngStream,
) -> Result<StepResult<E>, StepError> {
    if env.terminal(state) {
        return Err(StepError::Terminated);
    }
    if let Some(unknown) = action.keys().find(|id| env.agent_index(id).is_none()) {
        return Err(StepError::UnknownAgent(unknown.clone()));
    }

    let agents = env.agents();
    let mut resolved = Vec::with_capacity(agents.len());
    for (idx, id) in agents.iter().enumerate() {
        let chosen = action.get(id).copied();
        let a = if env.is_present(state, idx) {
            let a = chosen.ok_or_else(|| StepError::MissingAction(id.clone()))?;
            if !env.legal_actions(state, idx).contains(&a) {
                return Err(StepError::IllegalAction {
                    agent: id.clone(),
                    action: a.to_string(),
                });
            }
            a
        } else {
            match chosen {
                Some(a) if a != E::Action::noop() => {
                    return Err(StepError::IllegalAction {
                        agent: id.clone(),
                        action: a.to_string(),
                    })
                }
                _ => E::Action::noop(),
            }
        };
        resolved.push(a);
    }

    let (next_state, events) = env.transition(state, &resolved, rng);
    let rewards = env.reward(&events, &next_state);
    let observations = env.observe(&next_state, &resolved);
    let terminated = env.terminal(&next_state);

    Ok(StepResult {
        actions: agents.iter().cloned().zip(resolved).collect(),
        rewards: agents.iter().cloned().zip(rewards).collect(),
        observations: agents.iter().cloned().zip(observations).collect(),
        terminated,
        events,
        next_state,
    })
}

/// A decision rule for one agent.
///
/// Policies keep whatever private memory they need between queries; `reset`
/// clears it at the start of each episode.
pub trait Policy<E: Environment>: Send {
    fn name(&self) -> &str;
    fn reset(&mut self) {}
    fn act(&mut self, obs: &E::Observation, rng: &mut RngStream) -> E::Action;
}

/// Coordinates on a grid, row first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub y: usize,
    pub x: usize,
}

impl Cell {
    pub fn new(y: usize, x: usize) -> Self {
        Cell { y, x }
    }

    pub fn manhattan(self, other: Cell) -> usize {
        self.y.abs_diff(other.y) + self.x.abs_diff(other.x)
    }

    pub fn chebyshev(self, other: Cell) -> usize {
        self.y.abs_diff(other.y).max(self.x.abs_diff(other.x))
    }
}

impl Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.y, self.x)
    }
}

/// Parses `name` or `name_<index>` forms used by every domain's actions.
pub(crate) fn split_indexed(s: &str) -> Option<(&str, Option<usize>)> {
    match s.split_once('_') {
        None => Some((s, None)),
        Some((head, idx)) => idx.parse().ok().map(|i| (head, Some(i))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unrecognised action `{0}`")]
pub struct ParseActionError(pub String);
