use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::structures::{FireTask, Firefighter};
use crate::posg::{split_indexed, AgentId, Cell, DomainAction, ParseActionError};

/// `fight_i` targets the i-th active fire within Chebyshev distance 1 of the
/// agent, counting in row-major order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WildfireAction {
    Noop,
    Fight(usize),
}

impl DomainAction for WildfireAction {
    fn noop() -> Self {
        WildfireAction::Noop
    }

    fn class(&self) -> &'static str {
        match self {
            WildfireAction::Noop => "noop",
            WildfireAction::Fight(_) => "fight",
        }
    }
}

impl fmt::Display for WildfireAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WildfireAction::Noop => f.write_str("noop"),
            WildfireAction::Fight(i) => write!(f, "fight_{i}"),
        }
    }
}

impl FromStr for WildfireAction {
    type Err = ParseActionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match split_indexed(s) {
            Some(("noop", None)) => Ok(WildfireAction::Noop),
            Some(("fight", Some(i))) => Ok(WildfireAction::Fight(i)),
            _ => Err(ParseActionError(s.to_string())),
        }
    }
}

impl TryFrom<String> for WildfireAction {
    type Error = ParseActionError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<WildfireAction> for String {
    fn from(a: WildfireAction) -> String {
        a.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OtherFirefighter {
    pub id: AgentId,
    pub position: Cell,
    pub present: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FireView {
    pub position: Cell,
    pub agents_required: u32,
    pub intensity: u32,
}

impl From<&FireTask> for FireView {
    fn from(f: &FireTask) -> Self {
        FireView {
            position: f.position,
            agents_required: f.agents_required,
            intensity: f.intensity,
        }
    }
}

/// What one firefighter sees. Absent firefighters get an empty observation
/// with `present = false`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WildfireObservation {
    pub step: usize,
    pub present: bool,
    pub own: Option<Firefighter>,
    pub others: Vec<OtherFirefighter>,
    /// Active fires in row-major order.
    pub fires: Vec<FireView>,
}

impl WildfireObservation {
    /// Adjacent fires in `fight_i` order.
    pub fn targets(&self) -> Vec<FireView> {
        match &self.own {
            Some(me) => self
                .fires
                .iter()
                .filter(|f| f.position.chebyshev(me.position) <= 1)
                .copied()
                .collect(),
            None => Vec::new(),
        }
    }

    pub fn legal_actions(&self) -> Vec<WildfireAction> {
        let mut legal = vec![WildfireAction::Noop];
        match &self.own {
            Some(me) if self.present && me.suppressant > 0 => {
                legal.extend((0..self.targets().len()).map(WildfireAction::Fight));
            }
            _ => {}
        }
        legal
    }
}
