use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::structures::{CyberAgent, Side};
use crate::posg::{split_indexed, AgentId, DomainAction, ParseActionError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum CyberAction {
    Noop,
    Patch,
    Monitor,
    Move(usize),
}

impl DomainAction for CyberAction {
    fn noop() -> Self {
        CyberAction::Noop
    }

    fn class(&self) -> &'static str {
        match self {
            CyberAction::Noop => "noop",
            CyberAction::Patch => "patch",
            CyberAction::Monitor => "monitor",
            CyberAction::Move(_) => "move",
        }
    }
}

impl fmt::Display for CyberAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CyberAction::Noop => f.write_str("noop"),
            CyberAction::Patch => f.write_str("patch"),
            CyberAction::Monitor => f.write_str("monitor"),
            CyberAction::Move(i) => write!(f, "move_{i}"),
        }
    }
}

impl FromStr for CyberAction {
    type Err = ParseActionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match split_indexed(s) {
            Some(("noop", None)) => Ok(CyberAction::Noop),
            Some(("patch", None)) => Ok(CyberAction::Patch),
            Some(("monitor", None)) => Ok(CyberAction::Monitor),
            Some(("move", Some(i))) => Ok(CyberAction::Move(i)),
            _ => Err(ParseActionError(s.to_string())),
        }
    }
}

impl TryFrom<String> for CyberAction {
    type Error = ParseActionError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<CyberAction> for String {
    fn from(a: CyberAction) -> String {
        a.to_string()
    }
}

/// Environment-controlled attacker choices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackerAction {
    Idle,
    Exploit,
    Move(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AgentPower {
    pub id: AgentId,
    pub side: Side,
    pub power: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyberObservation {
    pub step: usize,
    pub own: CyberAgent,
    pub others: Vec<AgentPower>,
    pub node_count: usize,
    /// Every node's state, present only right after this defender monitored.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_states: Option<Vec<u8>>,
}

impl CyberObservation {
    pub fn legal_actions(&self) -> Vec<CyberAction> {
        legal_for(&self.own, self.node_count)
    }
}

pub(crate) fn legal_for(agent: &CyberAgent, node_count: usize) -> Vec<CyberAction> {
    if !agent.present {
        return vec![CyberAction::Noop];
    }
    let mut legal = vec![CyberAction::Noop, CyberAction::Patch, CyberAction::Monitor];
    legal.extend((0..node_count).filter(|&i| i != agent.location).map(CyberAction::Move));
    legal
}
