use serde::{Deserialize, Serialize};

use crate::config::{check_probability, ConfigError};
use crate::posg::{AgentId, Cell, TaskId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirefighterSpec {
    pub y: usize,
    pub x: usize,
    #[serde(default = "default_power")]
    pub power: f64,
    #[serde(default = "default_capacity")]
    pub capacity: u32,
}

fn default_power() -> f64 {
    1.0
}

fn default_capacity() -> u32 {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FireSpec {
    pub y: usize,
    pub x: usize,
    pub agents_required: u32,
    pub intensity: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedValue {
    pub value: u32,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WildfireConfig {
    pub height: usize,
    pub width: usize,
    pub agents: Vec<FirefighterSpec>,
    pub fires: Vec<FireSpec>,
    /// Chance that an active fire ignites each ignitable orthogonal neighbour per step.
    pub p_spread: f64,
    /// Chance that an active fire not suppressed this step gains one intensity level.
    pub p_intensify: f64,
    pub burnout_level: u32,
    /// Steps a depleted firefighter spends away refilling.
    pub refill_steps: u32,
    /// Distribution of `agents_required` for fires created by spread.
    pub spawn_agents_required: Vec<WeightedValue>,
    pub max_steps: usize,
}

impl Default for WildfireConfig {
    fn default() -> Self {
        WildfireConfig {
            height: 5,
            width: 5,
            agents: vec![
                FirefighterSpec { y: 1, x: 1, power: 1.0, capacity: 2 },
                FirefighterSpec { y: 1, x: 3, power: 1.0, capacity: 2 },
                FirefighterSpec { y: 3, x: 2, power: 1.0, capacity: 2 },
            ],
            fires: vec![
                FireSpec { y: 0, x: 2, agents_required: 1, intensity: 2 },
                FireSpec { y: 2, x: 2, agents_required: 2, intensity: 3 },
                FireSpec { y: 4, x: 1, agents_required: 1, intensity: 1 },
            ],
            p_spread: 0.05,
            p_intensify: 0.3,
            burnout_level: 5,
            refill_steps: 2,
            spawn_agents_required: vec![
                WeightedValue { value: 1, weight: 0.5 },
                WeightedValue { value: 2, weight: 0.35 },
                WeightedValue { value: 3, weight: 0.15 },
            ],
            max_steps: 100,
        }
    }
}

impl WildfireConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.height == 0 {
            return Err(ConfigError::invalid("height", "must be positive"));
        }
        if self.width == 0 {
            return Err(ConfigError::invalid("width", "must be positive"));
        }
        if self.agents.is_empty() {
            return Err(ConfigError::invalid("agents", "at least one firefighter is required"));
        }
        check_probability("p_spread", self.p_spread)?;
        check_probability("p_intensify", self.p_intensify)?;
        if self.burnout_level < 2 {
            return Err(ConfigError::invalid("burnout_level", "must be at least 2"));
        }
        if self.refill_steps == 0 {
            return Err(ConfigError::invalid("refill_steps", "must be positive"));
        }
        for (i, a) in self.agents.iter().enumerate() {
            if a.y >= self.height || a.x >= self.width {
                return Err(ConfigError::invalid(format!("agents[{i}]"), "position out of bounds"));
            }
            if !(a.power.is_finite() && a.power > 0.0) {
                return Err(ConfigError::invalid(format!("agents[{i}].power"), "must be positive"));
            }
            if a.capacity == 0 {
                return Err(ConfigError::invalid(format!("agents[{i}].capacity"), "must be positive"));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for (i, f) in self.fires.iter().enumerate() {
            if f.y >= self.height || f.x >= self.width {
                return Err(ConfigError::invalid(format!("fires[{i}]"), "position out of bounds"));
            }
            if !seen.insert((f.y, f.x)) {
                return Err(ConfigError::invalid(format!("fires[{i}]"), "two fires share a cell"));
            }
            if f.agents_required == 0 {
                return Err(ConfigError::invalid(
                    format!("fires[{i}].agents_required"),
                    "must be positive",
                ));
            }
            if f.intensity == 0 || f.intensity >= self.burnout_level {
                return Err(ConfigError::invalid(
                    format!("fires[{i}].intensity"),
                    format!("must lie strictly between 0 and burnout_level {}", self.burnout_level),
                ));
            }
        }
        if self.spawn_agents_required.is_empty() {
            return Err(ConfigError::invalid("spawn_agents_required", "must not be empty"));
        }
        for (i, w) in self.spawn_agents_required.iter().enumerate() {
            if !(w.weight.is_finite() && w.weight > 0.0) {
                return Err(ConfigError::invalid(
                    format!("spawn_agents_required[{i}].weight"),
                    "must be positive",
                ));
            }
            if w.value == 0 {
                return Err(ConfigError::invalid(
                    format!("spawn_agents_required[{i}].value"),
                    "must be positive",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Firefighter {
    pub id: AgentId,
    pub position: Cell,
    pub power: f64,
    pub suppressant: u32,
    pub capacity: u32,
    pub present: bool,
    pub refill_timer: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FireStatus {
    Active,
    PutOut,
    BurnedOut,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FireTask {
    pub id: TaskId,
    pub position: Cell,
    pub agents_required: u32,
    pub intensity: u32,
    pub status: FireStatus,
}

impl FireTask {
    pub fn is_active(&self) -> bool {
        self.status == FireStatus::Active
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WildfireState {
    pub t: usize,
    pub agents: Vec<Firefighter>,
    /// Every fire ever created, in creation order.
    pub fires: Vec<FireTask>,
}

impl WildfireState {
    /// Active fires in row-major order of position (creation order on ties).
    pub fn active_fires(&self) -> Vec<&FireTask> {
        let mut active: Vec<&FireTask> = self.fires.iter().filter(|f| f.is_active()).collect();
        active.sort_by_key(|f| (f.position, f.id));
        active
    }

    pub fn count(&self, status: FireStatus) -> usize {
        self.fires.iter().filter(|f| f.status == status).count()
    }
}
