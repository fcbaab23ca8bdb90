use serde::{Deserialize, Serialize};

use crate::config::{check_probability, ConfigError};
use crate::posg::{AgentId, TaskId};

/// Per-state reward values, indexed by state (0 = fully patched, 4 = fully exploited).
pub const STATE_VALUES: [f64; 5] = [4.0, 0.0, -2.0, -4.0, -8.0];
pub const WORST_STATE: u8 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CyberAgentSpec {
    pub location: usize,
    #[serde(default = "unit_power")]
    pub power: f64,
}

fn unit_power() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CyberConfig {
    pub nodes: usize,
    /// Directed `[from, to]` connections.
    pub edges: Vec<[usize; 2]>,
    pub initial_states: Vec<u8>,
    pub defenders: Vec<CyberAgentSpec>,
    pub attackers: Vec<CyberAgentSpec>,
    pub p_leave: f64,
    pub p_return: f64,
    pub values: Vec<f64>,
    /// Power that counts as one unit of net pressure in state-change events.
    pub power_unit: f64,
    pub max_steps: usize,
}

impl Default for CyberConfig {
    fn default() -> Self {
        CyberConfig {
            nodes: 4,
            edges: vec![[0, 1], [0, 2], [1, 2], [1, 3], [2, 3], [3, 0]],
            initial_states: vec![2; 4],
            defenders: vec![
                CyberAgentSpec { location: 0, power: 1.0 },
                CyberAgentSpec { location: 2, power: 1.0 },
            ],
            attackers: vec![
                CyberAgentSpec { location: 1, power: 1.0 },
                CyberAgentSpec { location: 3, power: 1.0 },
            ],
            p_leave: 0.1,
            p_return: 0.5,
            values: STATE_VALUES.to_vec(),
            power_unit: 1.0,
            max_steps: 100,
        }
    }
}

impl CyberConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.nodes == 0 {
            return Err(ConfigError::invalid("nodes", "must be positive"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, &[from, to]) in self.edges.iter().enumerate() {
            if from >= self.nodes || to >= self.nodes {
                return Err(ConfigError::invalid(
                    format!("edges[{i}]"),
                    format!("references a node outside 0..{}", self.nodes),
                ));
            }
            if from == to {
                return Err(ConfigError::invalid(format!("edges[{i}]"), "self-loop"));
            }
            if !seen.insert((from, to)) {
                return Err(ConfigError::invalid(format!("edges[{i}]"), "duplicate edge"));
            }
        }
        if self.initial_states.len() != self.nodes {
            return Err(ConfigError::invalid(
                "initial_states",
                format!("expected {} entries, found {}", self.nodes, self.initial_states.len()),
            ));
        }
        if let Some(i) = self.initial_states.iter().position(|&s| s > WORST_STATE) {
            return Err(ConfigError::invalid(format!("initial_states[{i}]"), "must be in 0..=4"));
        }
        if self.defenders.is_empty() {
            return Err(ConfigError::invalid("defenders", "at least one defender is required"));
        }
        for (field, agents) in [("defenders", &self.defenders), ("attackers", &self.attackers)] {
            for (i, a) in agents.iter().enumerate() {
                if a.location >= self.nodes {
                    return Err(ConfigError::invalid(
                        format!("{field}[{i}].location"),
                        "not a node id",
                    ));
                }
                if !(a.power.is_finite() && a.power > 0.0) {
                    return Err(ConfigError::invalid(format!("{field}[{i}].power"), "must be positive"));
                }
            }
        }
        check_probability("p_leave", self.p_leave)?;
        check_probability("p_return", self.p_return)?;
        if self.values != STATE_VALUES {
            return Err(ConfigError::invalid("values", "must be [4, 0, -2, -4, -8]"));
        }
        if !(self.power_unit.is_finite() && self.power_unit > 0.0) {
            return Err(ConfigError::invalid("power_unit", "must be positive"));
        }
        Ok(())
    }

    pub fn out_degrees(&self) -> Vec<u32> {
        let mut out = vec![0; self.nodes];
        for &[from, _] in &self.edges {
            out[from] += 1;
        }
        out
    }

    pub fn out_neighbors(&self, node: usize) -> Vec<usize> {
        let mut n: Vec<usize> = self.edges.iter().filter(|e| e[0] == node).map(|e| e[1]).collect();
        n.sort_unstable();
        n
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubnetNode {
    pub id: TaskId,
    pub state_index: u8,
    pub outgoing: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Defender,
    Attacker,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyberAgent {
    pub id: AgentId,
    pub side: Side,
    pub location: usize,
    pub power: f64,
    pub present: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CyberState {
    pub t: usize,
    pub nodes: Vec<SubnetNode>,
    pub defenders: Vec<CyberAgent>,
    pub attackers: Vec<CyberAgent>,
    /// Which defenders monitored during the step that produced this state.
    pub monitored: Vec<bool>,
}
