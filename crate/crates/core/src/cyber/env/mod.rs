pub mod spaces;
pub mod structures;
pub mod transitions;

use std::collections::BTreeMap;

use crate::config::{ConfigError, Domain, EnvConfig};
use crate::posg::{AgentId, Environment, RngStream, StepResult};
use spaces::{legal_for, AgentPower, CyberAction, CyberObservation};
use structures::{CyberAgent, CyberConfig, CyberState, Side, SubnetNode};
use transitions::CyberEvent;

/// Network defense. Defenders are the controlled agents; attackers are
/// scripted by the environment.
#[derive(Clone, Debug)]
pub struct Cyber {
    config: CyberConfig,
    defenders: Vec<AgentId>,
}

impl Cyber {
    pub fn new(config: CyberConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let defenders = (0..config.defenders.len())
            .map(|i| AgentId::new(format!("defender_{i}")).expect("non-empty"))
            .collect();
        Ok(Cyber { config, defenders })
    }

    pub fn settings(&self) -> &CyberConfig {
        &self.config
    }
}

impl Environment for Cyber {
    type State = CyberState;
    type Action = CyberAction;
    type Observation = CyberObservation;
    type Event = CyberEvent;

    const DOMAIN: Domain = Domain::Cybersecurity;

    fn config(&self) -> EnvConfig {
        EnvConfig::Cybersecurity(self.config.clone())
    }

    fn agents(&self) -> &[AgentId] {
        &self.defenders
    }

    fn max_steps(&self) -> usize {
        self.config.max_steps
    }

    fn initial_state(&self, _rng: &mut RngStream) -> CyberState {
        let out = self.config.out_degrees();
        let nodes = self
            .config
            .initial_states
            .iter()
            .enumerate()
            .map(|(i, &s)| SubnetNode {
                id: i as u32,
                state_index: s,
                outgoing: out[i],
            })
            .collect();
        let defenders = self
            .config
            .defenders
            .iter()
            .zip(&self.defenders)
            .map(|(spec, id)| CyberAgent {
                id: id.clone(),
                side: Side::Defender,
                location: spec.location,
                power: spec.power,
                present: true,
            })
            .collect();
        let attackers = self
            .config
            .attackers
            .iter()
            .enumerate()
            .map(|(i, spec)| CyberAgent {
                id: AgentId::new(format!("attacker_{i}")).expect("non-empty"),
                side: Side::Attacker,
                location: spec.location,
                power: spec.power,
                present: true,
            })
            .collect();
        CyberState {
            t: 0,
            nodes,
            defenders,
            attackers,
            monitored: vec![false; self.defenders.len()],
        }
    }

    fn is_present(&self, state: &CyberState, agent: usize) -> bool {
        state.defenders[agent].present
    }

    fn legal_actions(&self, state: &CyberState, agent: usize) -> Vec<CyberAction> {
        legal_for(&state.defenders[agent], state.nodes.len())
    }

    fn transition(
        &self,
        state: &CyberState,
        actions: &[CyberAction],
        rng: &mut RngStream,
    ) -> (CyberState, Vec<CyberEvent>) {
        transitions::transition(&self.config, state, actions, rng)
    }

    fn reward(&self, _events: &[CyberEvent], next: &CyberState) -> Vec<f64> {
        vec![transitions::network_value(next); self.defenders.len()]
    }

    fn observe(&self, state: &CyberState, _actions: &[CyberAction]) -> Vec<CyberObservation> {
        let everyone: Vec<&CyberAgent> = state.defenders.iter().chain(&state.attackers).collect();
        state
            .defenders
            .iter()
            .enumerate()
            .map(|(i, me)| CyberObservation {
                step: state.t,
                own: me.clone(),
                others: everyone
                    .iter()
                    .filter(|a| a.id != me.id)
                    .map(|a| AgentPower {
                        id: a.id.clone(),
                        side: a.side,
                        power: a.power,
                    })
                    .collect(),
                node_count: state.nodes.len(),
                node_states: state.monitored[i]
                    .then(|| state.nodes.iter().map(|n| n.state_index).collect()),
            })
            .collect()
    }

    fn terminal(&self, _state: &CyberState) -> bool {
        false
    }

    fn observed_legal_actions(obs: &CyberObservation) -> Vec<CyberAction> {
        obs.legal_actions()
    }

    fn team_reward(rewards: &[f64]) -> f64 {
        rewards.first().copied().unwrap_or(0.0)
    }

    fn action_classes() -> &'static [&'static str] {
        &["monitor", "move", "noop", "patch"]
    }

    fn metric_names() -> &'static [&'static str] {
        &["final_node_state", "mean_node_state", "simulation_length"]
    }

    fn accumulate_metrics(&self, result: &StepResult<Self>, acc: &mut BTreeMap<String, f64>) {
        let nodes = &result.next_state.nodes;
        let mean = nodes.iter().map(|n| n.state_index as f64).sum::<f64>() / nodes.len() as f64;
        let steps = acc.entry("simulation_length".into()).or_insert(0.0);
        *steps += 1.0;
        let steps = *steps;
        let running = acc.entry("mean_node_state".into()).or_insert(0.0);
        *running += (mean - *running) / steps;
        acc.insert("final_node_state".into(), mean);
    }
}
