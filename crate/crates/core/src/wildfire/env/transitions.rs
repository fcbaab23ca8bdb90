//! Wildfire dynamics, applied in a fixed phase order: suppression, suppressant
//! bookkeeping, intensification, spread.

use serde::{Deserialize, Serialize};

use super::spaces::WildfireAction;
use super::structures::{FireStatus, FireTask, WildfireConfig, WildfireState};
use crate::posg::{AgentId, Cell, RngStream, TaskId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum WildfireEvent {
    Putout {
        fire: TaskId,
        position: Cell,
        agents_required: u32,
    },
    Burnout {
        fire: TaskId,
        position: Cell,
    },
    Ignited {
        fire: TaskId,
        position: Cell,
        agents_required: u32,
    },
    Depleted {
        agent: AgentId,
    },
    Refilled {
        agent: AgentId,
    },
}

/// Index into `state.fires` of the fire that `agent`'s action targets.
pub fn target_of(state: &WildfireState, agent: usize, action: WildfireAction) -> Option<usize> {
    let WildfireAction::Fight(k) = action else {
        return None;
    };
    let me = &state.agents[agent];
    let mut adjacent: Vec<(Cell, TaskId, usize)> = state
        .fires
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_active() && f.position.chebyshev(me.position) <= 1)
        .map(|(i, f)| (f.position, f.id, i))
        .collect();
    adjacent.sort();
    adjacent.get(k).map(|&(_, _, i)| i)
}

pub fn transition(
    config: &WildfireConfig,
    state: &WildfireState,
    actions: &[WildfireAction],
    rng: &mut RngStream,
) -> (WildfireState, Vec<WildfireEvent>) {
    let mut next = state.clone();
    let mut events = Vec::new();

    // Phase 1: suppression. A crew smaller than agents_required has no effect.
    let mut crew = vec![(0u32, 0.0f64); next.fires.len()];
    let mut fought = vec![false; next.agents.len()];
    for (i, &a) in actions.iter().enumerate() {
        if let Some(f) = target_of(state, i, a) {
            crew[f].0 += 1;
            crew[f].1 += state.agents[i].power;
            fought[i] = true;
        }
    }
    let mut suppressed = vec![false; next.fires.len()];
    for (idx, fire) in next.fires.iter_mut().enumerate() {
        let (count, power) = crew[idx];
        if !fire.is_active() || count == 0 || count < fire.agents_required {
            continue;
        }
        suppressed[idx] = true;
        let reduction = power.floor().max(0.0) as u32;
        fire.intensity = fire.intensity.saturating_sub(reduction);
        if fire.intensity == 0 {
            fire.status = FireStatus::PutOut;
            events.push(WildfireEvent::Putout {
                fire: fire.id,
                position: fire.position,
                agents_required: fire.agents_required,
            });
        }
    }

    // Phase 2: suppressant consumption and refill absence.
    for (i, agent) in next.agents.iter_mut().enumerate() {
        if !agent.present {
            agent.refill_timer = agent.refill_timer.saturating_sub(1);
            if agent.refill_timer == 0 {
                agent.present = true;
                agent.suppressant = agent.capacity;
                events.push(WildfireEvent::Refilled { agent: agent.id.clone() });
            }
        } else if fought[i] {
            agent.suppressant -= 1;
            if agent.suppressant == 0 {
                agent.present = false;
                agent.refill_timer = config.refill_steps;
                events.push(WildfireEvent::Depleted { agent: agent.id.clone() });
            }
        }
    }

    // Phase 3: intensification. One draw per active fire, in row-major order,
    // whether or not the fire was suppressed.
    let mut order: Vec<usize> = (0..next.fires.len()).filter(|&i| next.fires[i].is_active()).collect();
    order.sort_by_key(|&i| (next.fires[i].position, next.fires[i].id));
    for &idx in &order {
        let grows = rng.chance(config.p_intensify);
        let fire = &mut next.fires[idx];
        if grows && !suppressed[idx] {
            fire.intensity += 1;
            if fire.intensity >= config.burnout_level {
                fire.intensity = config.burnout_level;
                fire.status = FireStatus::BurnedOut;
                events.push(WildfireEvent::Burnout {
                    fire: fire.id,
                    position: fire.position,
                });
            }
        }
    }

    // Phase 4: spread to orthogonal neighbours. Cells holding an active fire
    // or a burned-out fire cannot ignite.
    let mut sources: Vec<Cell> = next.fires.iter().filter(|f| f.is_active()).map(|f| f.position).collect();
    sources.sort();
    for src in sources {
        for cell in orthogonal(src, config.height, config.width) {
            if !rng.chance(config.p_spread) {
                continue;
            }
            let blocked = next
                .fires
                .iter()
                .any(|f| f.position == cell && f.status != FireStatus::PutOut);
            if blocked {
                continue;
            }
            let agents_required = sample_required(config, rng);
            let id = next.fires.len() as TaskId;
            next.fires.push(FireTask {
                id,
                position: cell,
                agents_required,
                intensity: 1,
                status: FireStatus::Active,
            });
            events.push(WildfireEvent::Ignited {
                fire: id,
                position: cell,
                agents_required,
            });
        }
    }

    next.t += 1;
    (next, events)
}

fn orthogonal(c: Cell, height: usize, width: usize) -> impl Iterator<Item = Cell> {
    let up = c.y.checked_sub(1).map(|y| Cell::new(y, c.x));
    let left = c.x.checked_sub(1).map(|x| Cell::new(c.y, x));
    let right = (c.x + 1 < width).then(|| Cell::new(c.y, c.x + 1));
    let down = (c.y + 1 < height).then(|| Cell::new(c.y + 1, c.x));
    [up, left, right, down].into_iter().flatten()
}

fn sample_required(config: &WildfireConfig, rng: &mut RngStream) -> u32 {
    let total: f64 = config.spawn_agents_required.iter().map(|w| w.weight).sum();
    let mut u = rng.unit() * total;
    for w in &config.spawn_agents_required {
        if u < w.weight {
            return w.value;
        }
        u -= w.weight;
    }
    config.spawn_agents_required.last().expect("validated non-empty").value
}

/// Team reward: 2^agents_required per putout, -1 per burnout.
pub fn team_reward(events: &[WildfireEvent]) -> f64 {
    events
        .iter()
        .map(|e| match e {
            WildfireEvent::Putout { agents_required, .. } => 2f64.powi(*agents_required as i32),
            WildfireEvent::Burnout { .. } => -1.0,
            _ => 0.0,
        })
        .sum()
}
