//! Ridesharing dynamics: task lifecycle updates, implicit driver motion, then
//! passenger arrivals.

use serde::{Deserialize, Serialize};

use super::spaces::RideshareAction;
use super::structures::{Lifecycle, PassengerTask, RideshareConfig, RideshareState};
use crate::posg::{AgentId, Cell, RngStream, TaskId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum RideshareEvent {
    Entered {
        task: TaskId,
        position: Cell,
        destination: Cell,
        fare: f64,
    },
    Accepted {
        task: TaskId,
        driver: AgentId,
    },
    /// `driver` tried to accept a task another driver took earlier this step.
    AcceptConflict {
        task: TaskId,
        driver: AgentId,
    },
    PickedUp {
        task: TaskId,
        driver: AgentId,
    },
    Completed {
        task: TaskId,
        driver: AgentId,
        fare: f64,
    },
}

/// Draws a passenger at a uniform cell with a uniform distinct destination.
/// Always consumes exactly two index draws.
pub fn draw_passenger(config: &RideshareConfig, id: TaskId, t: usize, rng: &mut RngStream) -> PassengerTask {
    let cells = config.height * config.width;
    let origin = rng.index(cells);
    let mut dest = rng.index(cells - 1);
    if dest >= origin {
        dest += 1;
    }
    let cell = |i: usize| Cell::new(i / config.width, i % config.width);
    let (position, destination) = (cell(origin), cell(dest));
    PassengerTask {
        id,
        position,
        entry_position: position,
        destination,
        fare: position.manhattan(destination) as f64,
        lifecycle: Lifecycle::Unaccepted,
        assigned_driver: None,
        t_entered: t,
        t_accepted: None,
        t_picked: None,
    }
}

/// Where a driver heads: the oldest riding passenger's destination, else the
/// oldest accepted passenger's pickup point.
pub fn focus_target(state: &RideshareState, driver: usize) -> Option<Cell> {
    let id = &state.drivers[driver].id;
    let mine = |l: Lifecycle| {
        state
            .tasks
            .iter()
            .filter(move |t| t.lifecycle == l && t.assigned_driver.as_ref() == Some(id))
    };
    if let Some(t) = mine(Lifecycle::PickedUp).min_by_key(|t| (t.t_picked, t.id)) {
        return Some(t.destination);
    }
    mine(Lifecycle::Accepted)
        .min_by_key(|t| (t.t_accepted, t.id))
        .map(|t| t.position)
}

/// One Manhattan step toward `target`, closing the row gap first.
pub fn step_toward(from: Cell, target: Cell) -> Cell {
    if from.y != target.y {
        let y = if target.y > from.y { from.y + 1 } else { from.y - 1 };
        Cell::new(y, from.x)
    } else if from.x != target.x {
        let x = if target.x > from.x { from.x + 1 } else { from.x - 1 };
        Cell::new(from.y, x)
    } else {
        from
    }
}

pub fn transition(
    config: &RideshareConfig,
    state: &RideshareState,
    actions: &[RideshareAction],
    rng: &mut RngStream,
) -> (RideshareState, Vec<RideshareEvent>) {
    let mut next = state.clone();
    let mut events = Vec::new();
    let now = state.t;

    // Phase 1: lifecycle updates in roster order; later accepts of a taken task
    // degrade to noop.
    for (d, &a) in actions.iter().enumerate() {
        let driver_id = next.drivers[d].id.clone();
        match a {
            RideshareAction::Noop => {}
            RideshareAction::Accept(task) => {
                let t = &mut next.tasks[task as usize];
                if t.lifecycle == Lifecycle::Unaccepted {
                    t.lifecycle = Lifecycle::Accepted;
                    t.assigned_driver = Some(driver_id.clone());
                    t.t_accepted = Some(now);
                    next.drivers[d].accepted_count += 1;
                    events.push(RideshareEvent::Accepted { task, driver: driver_id });
                } else {
                    events.push(RideshareEvent::AcceptConflict { task, driver: driver_id });
                }
            }
            RideshareAction::Pick(task) => {
                let t = &mut next.tasks[task as usize];
                t.lifecycle = Lifecycle::PickedUp;
                t.t_picked = Some(now);
                next.drivers[d].accepted_count -= 1;
                next.drivers[d].riding_count += 1;
                events.push(RideshareEvent::PickedUp { task, driver: driver_id });
            }
            RideshareAction::Drop(task) => {
                let t = &mut next.tasks[task as usize];
                t.lifecycle = Lifecycle::DroppedOff;
                next.drivers[d].riding_count -= 1;
                events.push(RideshareEvent::Completed {
                    task,
                    driver: driver_id,
                    fare: t.fare,
                });
            }
        }
    }

    // Phase 2: movement; riders travel with their driver.
    for d in 0..next.drivers.len() {
        let Some(target) = focus_target(&next, d) else { continue };
        let to = step_toward(next.drivers[d].position, target);
        next.drivers[d].position = to;
        let id = next.drivers[d].id.clone();
        for t in next.tasks.iter_mut() {
            if t.lifecycle == Lifecycle::PickedUp && t.assigned_driver.as_ref() == Some(&id) {
                t.position = to;
            }
        }
    }

    // Phase 3: arrivals. The draws happen whether or not a passenger spawns.
    let arrives = rng.chance(config.p_arrival);
    let candidate = draw_passenger(config, next.tasks.len() as TaskId, now, rng);
    if arrives && next.count(Lifecycle::Unaccepted) < config.max_open_tasks {
        events.push(RideshareEvent::Entered {
            task: candidate.id,
            position: candidate.position,
            destination: candidate.destination,
            fare: candidate.fare,
        });
        next.tasks.push(candidate);
    }

    next.t += 1;
    (next, events)
}

/// Per-driver reward: own completed fares plus the shared waiting charge.
pub fn rewards(config: &RideshareConfig, drivers: &[AgentId], events: &[RideshareEvent], next: &RideshareState) -> Vec<f64> {
    let waiting = next.waiting(config.penalize_accepted_waiting) as f64;
    let shared = config.waiting_penalty * waiting;
    drivers
        .iter()
        .map(|id| {
            let fares: f64 = events
                .iter()
                .filter_map(|e| match e {
                    RideshareEvent::Completed { driver, fare, .. } if driver == id => Some(*fare),
                    _ => None,
                })
                .sum();
            fares + shared
        })
        .collect()
}
