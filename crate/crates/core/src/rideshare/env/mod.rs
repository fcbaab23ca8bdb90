pub mod spaces;
pub mod structures;
pub mod transitions;

use std::collections::BTreeMap;

use crate::config::{ConfigError, Domain, EnvConfig};
use crate::posg::{AgentId, Cell, Environment, RngStream, StepResult, TaskId};
use spaces::{legal_for, OtherDriver, RideshareAction, RideshareObservation};
use structures::{Driver, Lifecycle, RideshareConfig, RideshareState};
use transitions::RideshareEvent;

/// Dynamic ridesharing: drivers accept, pick up and drop off passengers that
/// arrive over time; movement follows commitments.
#[derive(Clone, Debug)]
pub struct Rideshare {
    config: RideshareConfig,
    drivers: Vec<AgentId>,
}

impl Rideshare {
    pub fn new(config: RideshareConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let drivers = (0..config.drivers.len())
            .map(|i| AgentId::new(format!("driver_{i}")).expect("non-empty"))
            .collect();
        Ok(Rideshare { config, drivers })
    }

    pub fn settings(&self) -> &RideshareConfig {
        &self.config
    }
}

impl Environment for Rideshare {
    type State = RideshareState;
    type Action = RideshareAction;
    type Observation = RideshareObservation;
    type Event = RideshareEvent;

    const DOMAIN: Domain = Domain::Rideshare;

    fn config(&self) -> EnvConfig {
        EnvConfig::Rideshare(self.config.clone())
    }

    fn agents(&self) -> &[AgentId] {
        &self.drivers
    }

    fn max_steps(&self) -> usize {
        self.config.max_steps
    }

    fn initial_state(&self, rng: &mut RngStream) -> RideshareState {
        let drivers = self
            .config
            .drivers
            .iter()
            .zip(&self.drivers)
            .map(|(spec, id)| Driver {
                id: id.clone(),
                position: Cell::new(spec.y, spec.x),
                accepted_count: 0,
                riding_count: 0,
                accept_cap: spec.accept_cap,
                ride_cap: spec.ride_cap,
            })
            .collect();
        let tasks = (0..self.config.initial_passengers)
            .map(|i| transitions::draw_passenger(&self.config, i as TaskId, 0, rng))
            .collect();
        RideshareState { t: 0, drivers, tasks }
    }

    fn is_present(&self, _state: &RideshareState, _agent: usize) -> bool {
        true
    }

    fn legal_actions(&self, state: &RideshareState, agent: usize) -> Vec<RideshareAction> {
        legal_for(&state.drivers[agent], state.tasks.iter())
    }

    fn transition(
        &self,
        state: &RideshareState,
        actions: &[RideshareAction],
        rng: &mut RngStream,
    ) -> (RideshareState, Vec<RideshareEvent>) {
        transitions::transition(&self.config, state, actions, rng)
    }

    fn reward(&self, events: &[RideshareEvent], next: &RideshareState) -> Vec<f64> {
        transitions::rewards(&self.config, &self.drivers, events, next)
    }

    fn observe(&self, state: &RideshareState, _actions: &[RideshareAction]) -> Vec<RideshareObservation> {
        let unaccepted: Vec<_> = state
            .tasks
            .iter()
            .filter(|t| t.lifecycle == Lifecycle::Unaccepted)
            .cloned()
            .collect();
        state
            .drivers
            .iter()
            .map(|me| RideshareObservation {
                step: state.t,
                own: me.clone(),
                others: state
                    .drivers
                    .iter()
                    .filter(|o| o.id != me.id)
                    .map(|o| OtherDriver {
                        id: o.id.clone(),
                        position: o.position,
                        accepted_count: o.accepted_count,
                        riding_count: o.riding_count,
                    })
                    .collect(),
                unaccepted: unaccepted.clone(),
                assigned: state
                    .tasks
                    .iter()
                    .filter(|t| {
                        matches!(t.lifecycle, Lifecycle::Accepted | Lifecycle::PickedUp)
                            && t.assigned_driver.as_ref() == Some(&me.id)
                    })
                    .cloned()
                    .collect(),
            })
            .collect()
    }

    fn terminal(&self, _state: &RideshareState) -> bool {
        false
    }

    fn observed_legal_actions(obs: &RideshareObservation) -> Vec<RideshareAction> {
        obs.legal_actions()
    }

    fn team_reward(rewards: &[f64]) -> f64 {
        rewards.iter().sum()
    }

    fn action_classes() -> &'static [&'static str] {
        &["accept", "drop", "noop", "pick"]
    }

    fn metric_names() -> &'static [&'static str] {
        &["completions", "fares", "simulation_length", "waiting_total"]
    }

    fn accumulate_metrics(&self, result: &StepResult<Self>, acc: &mut BTreeMap<String, f64>) {
        for e in &result.events {
            if let RideshareEvent::Completed { fare, .. } = e {
                *acc.entry("completions".into()).or_insert(0.0) += 1.0;
                *acc.entry("fares".into()).or_insert(0.0) += fare;
            }
        }
        let waiting = result.next_state.waiting(self.config.penalize_accepted_waiting) as f64;
        *acc.entry("waiting_total".into()).or_insert(0.0) += waiting;
        *acc.entry("simulation_length".into()).or_insert(0.0) += 1.0;
    }
}
