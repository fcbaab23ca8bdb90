use serde::{Deserialize, Serialize};

use crate::config::{check_probability, ConfigError};
use crate::posg::{AgentId, Cell, TaskId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriverSpec {
    pub y: usize,
    pub x: usize,
    #[serde(default = "default_accept_cap")]
    pub accept_cap: u32,
    #[serde(default = "default_ride_cap")]
    pub ride_cap: u32,
}

fn default_accept_cap() -> u32 {
    3
}

fn default_ride_cap() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RideshareConfig {
    pub height: usize,
    pub width: usize,
    pub drivers: Vec<DriverSpec>,
    /// Passengers placed uniformly at random at reset.
    pub initial_passengers: usize,
    pub p_arrival: f64,
    /// No arrivals while this many passengers are unaccepted.
    pub max_open_tasks: usize,
    /// Charged to every driver per waiting passenger per step; non-positive.
    pub waiting_penalty: f64,
    /// Also charge for accepted passengers not yet picked up.
    pub penalize_accepted_waiting: bool,
    pub max_steps: usize,
}

impl Default for RideshareConfig {
    fn default() -> Self {
        RideshareConfig {
            height: 10,
            width: 10,
            drivers: vec![
                DriverSpec { y: 2, x: 2, accept_cap: 3, ride_cap: 2 },
                DriverSpec { y: 7, x: 7, accept_cap: 3, ride_cap: 2 },
            ],
            initial_passengers: 2,
            p_arrival: 0.2,
            max_open_tasks: 8,
            waiting_penalty: -0.1,
            penalize_accepted_waiting: false,
            max_steps: 200,
        }
    }
}

impl RideshareConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.height == 0 || self.width == 0 || self.height * self.width < 2 {
            return Err(ConfigError::invalid("height", "grid needs at least two cells"));
        }
        if self.drivers.is_empty() {
            return Err(ConfigError::invalid("drivers", "at least one driver is required"));
        }
        for (i, d) in self.drivers.iter().enumerate() {
            if d.y >= self.height || d.x >= self.width {
                return Err(ConfigError::invalid(format!("drivers[{i}]"), "position out of bounds"));
            }
            if d.accept_cap == 0 {
                return Err(ConfigError::invalid(format!("drivers[{i}].accept_cap"), "must be positive"));
            }
            if d.ride_cap == 0 {
                return Err(ConfigError::invalid(format!("drivers[{i}].ride_cap"), "must be positive"));
            }
        }
        check_probability("p_arrival", self.p_arrival)?;
        if self.initial_passengers > self.max_open_tasks {
            return Err(ConfigError::invalid("initial_passengers", "exceeds max_open_tasks"));
        }
        if !(self.waiting_penalty.is_finite() && self.waiting_penalty <= 0.0) {
            return Err(ConfigError::invalid("waiting_penalty", "must be a finite value <= 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Driver {
    pub id: AgentId,
    pub position: Cell,
    /// Accepted passengers not yet picked up.
    pub accepted_count: u32,
    pub riding_count: u32,
    pub accept_cap: u32,
    pub ride_cap: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lifecycle {
    Unaccepted,
    Accepted,
    PickedUp,
    DroppedOff,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PassengerTask {
    pub id: TaskId,
    /// Current position; equals the driver's while riding.
    pub position: Cell,
    pub entry_position: Cell,
    pub destination: Cell,
    pub fare: f64,
    pub lifecycle: Lifecycle,
    pub assigned_driver: Option<AgentId>,
    pub t_entered: usize,
    pub t_accepted: Option<usize>,
    pub t_picked: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RideshareState {
    pub t: usize,
    pub drivers: Vec<Driver>,
    /// Every passenger that ever entered, by id.
    pub tasks: Vec<PassengerTask>,
}

impl RideshareState {
    pub fn count(&self, lifecycle: Lifecycle) -> usize {
        self.tasks.iter().filter(|t| t.lifecycle == lifecycle).count()
    }

    pub fn waiting(&self, include_accepted: bool) -> usize {
        self.tasks
            .iter()
            .filter(|t| match t.lifecycle {
                Lifecycle::Unaccepted => true,
                Lifecycle::Accepted => include_accepted,
                _ => false,
            })
            .count()
    }
}
