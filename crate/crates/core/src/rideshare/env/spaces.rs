use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::structures::{Driver, Lifecycle, PassengerTask};
use crate::posg::{split_indexed, AgentId, Cell, DomainAction, ParseActionError, TaskId};

/// Task-indexed actions; the index is the passenger's task id.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum RideshareAction {
    Noop,
    Accept(TaskId),
    Pick(TaskId),
    Drop(TaskId),
}

impl DomainAction for RideshareAction {
    fn noop() -> Self {
        RideshareAction::Noop
    }

    fn class(&self) -> &'static str {
        match self {
            RideshareAction::Noop => "noop",
            RideshareAction::Accept(_) => "accept",
            RideshareAction::Pick(_) => "pick",
            RideshareAction::Drop(_) => "drop",
        }
    }
}

impl fmt::Display for RideshareAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RideshareAction::Noop => f.write_str("noop"),
            RideshareAction::Accept(i) => write!(f, "accept_{i}"),
            RideshareAction::Pick(i) => write!(f, "pick_{i}"),
            RideshareAction::Drop(i) => write!(f, "drop_{i}"),
        }
    }
}

impl FromStr for RideshareAction {
    type Err = ParseActionError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let id = |i: usize| TaskId::try_from(i).map_err(|_| ParseActionError(s.to_string()));
        match split_indexed(s) {
            Some(("noop", None)) => Ok(RideshareAction::Noop),
            Some(("accept", Some(i))) => Ok(RideshareAction::Accept(id(i)?)),
            Some(("pick", Some(i))) => Ok(RideshareAction::Pick(id(i)?)),
            Some(("drop", Some(i))) => Ok(RideshareAction::Drop(id(i)?)),
            _ => Err(ParseActionError(s.to_string())),
        }
    }
}

impl TryFrom<String> for RideshareAction {
    type Error = ParseActionError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<RideshareAction> for String {
    fn from(a: RideshareAction) -> String {
        a.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OtherDriver {
    pub id: AgentId,
    pub position: Cell,
    pub accepted_count: u32,
    pub riding_count: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RideshareObservation {
    pub step: usize,
    pub own: Driver,
    pub others: Vec<OtherDriver>,
    /// Passengers nobody has accepted yet, by id.
    pub unaccepted: Vec<PassengerTask>,
    /// Passengers accepted or riding with this driver, by id.
    pub assigned: Vec<PassengerTask>,
}

impl RideshareObservation {
    pub fn legal_actions(&self) -> Vec<RideshareAction> {
        legal_for(&self.own, self.unaccepted.iter().chain(&self.assigned))
    }
}

pub(crate) fn legal_for<'a>(
    driver: &Driver,
    tasks: impl Iterator<Item = &'a PassengerTask>,
) -> Vec<RideshareAction> {
    let mut legal = vec![RideshareAction::Noop];
    for t in tasks {
        let mine = t.assigned_driver.as_ref() == Some(&driver.id);
        match t.lifecycle {
            Lifecycle::Unaccepted if driver.accepted_count < driver.accept_cap => {
                legal.push(RideshareAction::Accept(t.id))
            }
            Lifecycle::Accepted
                if mine && t.position == driver.position && driver.riding_count < driver.ride_cap =>
            {
                legal.push(RideshareAction::Pick(t.id))
            }
            Lifecycle::PickedUp if mine && t.destination == driver.position => {
                legal.push(RideshareAction::Drop(t.id))
            }
            _ => {}
        }
    }
    legal.sort();
    legal
}
