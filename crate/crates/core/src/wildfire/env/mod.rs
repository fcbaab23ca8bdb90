pub mod spaces;
pub mod structures;
pub mod transitions;

use std::collections::BTreeMap;

use crate::config::{ConfigError, Domain, EnvConfig};
use crate::posg::{AgentId, Cell, Environment, RngStream, StepResult};
use spaces::{FireView, OtherFirefighter, WildfireAction, WildfireObservation};
use structures::{FireStatus, FireTask, Firefighter, WildfireConfig, WildfireState};
use transitions::WildfireEvent;

/// Wildfire suppression: stationary firefighters fight adjacent fires that
/// spread, intensify and burn out.
#[derive(Clone, Debug)]
pub struct Wildfire {
    config: WildfireConfig,
    agents: Vec<AgentId>,
}

impl Wildfire {
    pub fn new(config: WildfireConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let agents = (0..config.agents.len())
            .map(|i| AgentId::new(format!("firefighter_{i}")).expect("non-empty"))
            .collect();
        Ok(Wildfire { config, agents })
    }

    pub fn settings(&self) -> &WildfireConfig {
        &self.config
    }
}

impl Environment for Wildfire {
    type State = WildfireState;
    type Action = WildfireAction;
    type Observation = WildfireObservation;
    type Event = WildfireEvent;

    const DOMAIN: Domain = Domain::Wildfire;

    fn config(&self) -> EnvConfig {
        EnvConfig::Wildfire(self.config.clone())
    }

    fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    fn max_steps(&self) -> usize {
        self.config.max_steps
    }

    fn initial_state(&self, _rng: &mut RngStream) -> WildfireState {
        let agents = self
            .config
            .agents
            .iter()
            .zip(&self.agents)
            .map(|(spec, id)| Firefighter {
                id: id.clone(),
                position: Cell::new(spec.y, spec.x),
                power: spec.power,
                suppressant: spec.capacity,
                capacity: spec.capacity,
                present: true,
                refill_timer: 0,
            })
            .collect();
        let fires = self
            .config
            .fires
            .iter()
            .enumerate()
            .map(|(i, f)| FireTask {
                id: i as u32,
                position: Cell::new(f.y, f.x),
                agents_required: f.agents_required,
                intensity: f.intensity,
                status: FireStatus::Active,
            })
            .collect();
        WildfireState { t: 0, agents, fires }
    }

    fn is_present(&self, state: &WildfireState, agent: usize) -> bool {
        state.agents[agent].present
    }

    fn legal_actions(&self, state: &WildfireState, agent: usize) -> Vec<WildfireAction> {
        let me = &state.agents[agent];
        let mut legal = vec![WildfireAction::Noop];
        if me.present && me.suppressant > 0 {
            let adjacent = state
                .fires
                .iter()
                .filter(|f| f.is_active() && f.position.chebyshev(me.position) <= 1)
                .count();
            legal.extend((0..adjacent).map(WildfireAction::Fight));
        }
        legal
    }

    fn transition(
        &self,
        state: &WildfireState,
        actions: &[WildfireAction],
        rng: &mut RngStream,
    ) -> (WildfireState, Vec<WildfireEvent>) {
        transitions::transition(&self.config, state, actions, rng)
    }

    fn reward(&self, events: &[WildfireEvent], _next: &WildfireState) -> Vec<f64> {
        vec![transitions::team_reward(events); self.agents.len()]
    }

    fn observe(&self, state: &WildfireState, _actions: &[WildfireAction]) -> Vec<WildfireObservation> {
        let fires: Vec<FireView> = state.active_fires().into_iter().map(FireView::from).collect();
        state
            .agents
            .iter()
            .map(|me| {
                if !me.present {
                    return WildfireObservation {
                        step: state.t,
                        present: false,
                        own: None,
                        others: Vec::new(),
                        fires: Vec::new(),
                    };
                }
                let others = state
                    .agents
                    .iter()
                    .filter(|o| o.id != me.id)
                    .map(|o| OtherFirefighter {
                        id: o.id.clone(),
                        position: o.position,
                        present: o.present,
                    })
                    .collect();
                WildfireObservation {
                    step: state.t,
                    present: true,
                    own: Some(me.clone()),
                    others,
                    fires: fires.clone(),
                }
            })
            .collect()
    }

    fn terminal(&self, state: &WildfireState) -> bool {
        !state.fires.iter().any(FireTask::is_active)
    }

    fn observed_legal_actions(obs: &WildfireObservation) -> Vec<WildfireAction> {
        obs.legal_actions()
    }

    fn team_reward(rewards: &[f64]) -> f64 {
        rewards.first().copied().unwrap_or(0.0)
    }

    fn action_classes() -> &'static [&'static str] {
        &["fight", "noop"]
    }

    fn metric_names() -> &'static [&'static str] {
        &["burnouts", "fires_extinguished", "simulation_length"]
    }

    fn accumulate_metrics(&self, result: &StepResult<Self>, acc: &mut BTreeMap<String, f64>) {
        for e in &result.events {
            let key = match e {
                WildfireEvent::Putout { .. } => "fires_extinguished",
                WildfireEvent::Burnout { .. } => "burnouts",
                _ => continue,
            };
            *acc.entry(key.to_string()).or_insert(0.0) += 1.0;
        }
        *acc.entry("simulation_length".to_string()).or_insert(0.0) += 1.0;
    }
}
