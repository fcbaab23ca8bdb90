use super::env::spaces::{RideshareAction, RideshareObservation};
use super::env::Rideshare;
use crate::baselines::{common, Baselines};
use crate::posg::{Policy, RngStream};

/// Drop, then pick, then accept the nearest unaccepted passenger.
pub struct GreedyPolicy;

impl Policy<Rideshare> for GreedyPolicy {
    fn name(&self) -> &str {
        "greedy"
    }

    fn act(&mut self, obs: &RideshareObservation, _rng: &mut RngStream) -> RideshareAction {
        let legal = obs.legal_actions();
        let first = |f: fn(&RideshareAction) -> bool| legal.iter().copied().find(f);
        if let Some(a) = first(|a| matches!(a, RideshareAction::Drop(_))) {
            return a;
        }
        if let Some(a) = first(|a| matches!(a, RideshareAction::Pick(_))) {
            return a;
        }
        if obs.own.accepted_count >= obs.own.accept_cap {
            return RideshareAction::Noop;
        }
        obs.unaccepted
            .iter()
            .min_by_key(|t| (obs.own.position.manhattan(t.position), t.id))
            .map_or(RideshareAction::Noop, |t| RideshareAction::Accept(t.id))
    }
}

impl Baselines for Rideshare {
    fn baseline_names() -> &'static [&'static str] {
        &["noop", "random", "greedy"]
    }

    fn baseline(name: &str) -> Option<Box<dyn Policy<Self>>> {
        match name {
            "greedy" => Some(Box::new(GreedyPolicy)),
            other => common(other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posg::{AgentId, Cell, TaskId};
    use crate::rideshare::env::structures::{Driver, Lifecycle, PassengerTask};

    fn driver(accepted: u32) -> Driver {
        Driver {
            id: AgentId::new("driver_0").unwrap(),
            position: Cell::new(0, 0),
            accepted_count: accepted,
            riding_count: 0,
            accept_cap: 3,
            ride_cap: 2,
        }
    }

    fn task(id: TaskId, y: usize, x: usize) -> PassengerTask {
        PassengerTask {
            id,
            position: Cell::new(y, x),
            entry_position: Cell::new(y, x),
            destination: Cell::new(9, 9),
            fare: 0.0,
            lifecycle: Lifecycle::Unaccepted,
            assigned_driver: None,
            t_entered: 0,
            t_accepted: None,
            t_picked: None,
        }
    }

    fn obs(own: Driver, unaccepted: Vec<PassengerTask>, assigned: Vec<PassengerTask>) -> RideshareObservation {
        RideshareObservation { step: 0, own, others: vec![], unaccepted, assigned }
    }

    fn rng() -> RngStream {
        RngStream::new(0, 0)
    }

    #[test]
    fn nearest_with_lowest_id_tie() {
        let o = obs(driver(0), vec![task(0, 5, 0), task(1, 1, 1), task(2, 2, 0)], vec![]);
        assert_eq!(GreedyPolicy.act(&o, &mut rng()), RideshareAction::Accept(1));
    }

    #[test]
    fn drop_beats_accept() {
        let mut riding = task(3, 0, 0);
        riding.destination = Cell::new(0, 0);
        riding.lifecycle = Lifecycle::PickedUp;
        riding.assigned_driver = Some(AgentId::new("driver_0").unwrap());
        let mut d = driver(0);
        d.riding_count = 1;
        let o = obs(d, vec![task(0, 1, 0)], vec![riding]);
        assert_eq!(GreedyPolicy.act(&o, &mut rng()), RideshareAction::Drop(3));
    }

    #[test]
    fn capacity_gate_yields_noop() {
        let o = obs(driver(3), vec![task(0, 1, 0)], vec![]);
        assert_eq!(GreedyPolicy.act(&o, &mut rng()), RideshareAction::Noop);
    }

    #[test]
    fn registry() {
        for name in Rideshare::baseline_names() {
            assert_eq!(Rideshare::baseline(name).unwrap().name(), *name);
        }
        assert!(Rideshare::baseline("smallest").is_none());
    }
}
