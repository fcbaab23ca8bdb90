//! Network dynamics: presence churn, scripted attackers, relocation, then
//! per-node resolution of exploit pressure against patching.

use serde::{Deserialize, Serialize};

use super::spaces::{AttackerAction, CyberAction};
use super::structures::{CyberConfig, CyberState, STATE_VALUES, WORST_STATE};
use crate::posg::{AgentId, RngStream, TaskId};

const PRESENCE_LABEL: u64 = 0x7072_6573;

/// Chance that a present attacker exploits rather than moves.
pub const EXPLOIT_PROBABILITY: f64 = 0.8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum CyberEvent {
    Presence {
        agent: AgentId,
        present: bool,
    },
    NodeState {
        node: TaskId,
        from: u8,
        to: u8,
        /// Exploit minus patch power, in units of `power_unit`.
        net: f64,
    },
}

/// Scripted attacker choices for the current state. Absent attackers idle.
pub fn attacker_actions(
    config: &CyberConfig,
    state: &CyberState,
    rng: &mut RngStream,
) -> Vec<AttackerAction> {
    state
        .attackers
        .iter()
        .map(|a| {
            if !a.present {
                return AttackerAction::Idle;
            }
            if rng.chance(EXPLOIT_PROBABILITY) {
                return AttackerAction::Exploit;
            }
            let targets = config.out_neighbors(a.location);
            if targets.is_empty() {
                AttackerAction::Exploit
            } else {
                AttackerAction::Move(targets[rng.index(targets.len())])
            }
        })
        .collect()
}

pub fn transition(
    config: &CyberConfig,
    state: &CyberState,
    actions: &[CyberAction],
    rng: &mut RngStream,
) -> (CyberState, Vec<CyberEvent>) {
    let mut next = state.clone();
    let mut events = Vec::new();

    // Phase 1: presence, from a sub-stream so churn ignores everything else
    // drawn during the step.
    let mut presence = rng.fork(PRESENCE_LABEL);
    for agent in next.defenders.iter_mut().chain(next.attackers.iter_mut()) {
        let flip = if agent.present {
            presence.chance(config.p_leave)
        } else {
            presence.chance(config.p_return)
        };
        if flip {
            agent.present = !agent.present;
            events.push(CyberEvent::Presence {
                agent: agent.id.clone(),
                present: agent.present,
            });
        }
    }

    // Phase 2: attackers decide. An agent that just disconnected acts as idle.
    let attacks = attacker_actions(config, &next, rng);

    // Phase 3: relocation.
    for (d, &a) in next.defenders.iter_mut().zip(actions) {
        if let CyberAction::Move(to) = a {
            if d.present {
                d.location = to;
            }
        }
    }
    for (att, &a) in next.attackers.iter_mut().zip(&attacks) {
        if let AttackerAction::Move(to) = a {
            att.location = to;
        }
    }

    // Phase 4: resolve each node by the sign of net pressure.
    let mut net = vec![0.0f64; next.nodes.len()];
    for (att, &a) in next.attackers.iter().zip(&attacks) {
        if att.present && a == AttackerAction::Exploit {
            net[att.location] += att.power;
        }
    }
    for (d, &a) in next.defenders.iter().zip(actions) {
        if d.present && a == CyberAction::Patch {
            net[d.location] -= d.power;
        }
    }
    for (node, &pressure) in next.nodes.iter_mut().zip(&net) {
        let from = node.state_index;
        let to = if pressure > 0.0 {
            (from + 1).min(WORST_STATE)
        } else if pressure < 0.0 {
            from.saturating_sub(1)
        } else {
            from
        };
        if to != from {
            node.state_index = to;
            events.push(CyberEvent::NodeState {
                node: node.id,
                from,
                to,
                net: pressure / config.power_unit,
            });
        }
    }

    // Phase 5: monitor flags for observation building.
    next.monitored = next
        .defenders
        .iter()
        .zip(actions)
        .map(|(d, &a)| d.present && a == CyberAction::Monitor)
        .collect();

    next.t += 1;
    (next, events)
}

/// Network value: sum over nodes of value[state] * 2^outgoing.
pub fn network_value(state: &CyberState) -> f64 {
    state
        .nodes
        .iter()
        .map(|n| STATE_VALUES[n.state_index as usize] * 2f64.powi(n.outgoing as i32))
        .sum()
}
