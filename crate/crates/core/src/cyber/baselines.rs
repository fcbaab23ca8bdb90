use serde::Serialize;

use super::env::spaces::{CyberAction, CyberObservation};
use super::env::Cyber;
use crate::baselines::{common, Baselines};
use crate::posg::{Policy, RngStream};

/// Steps after which a defender's belief is refreshed by monitoring.
pub const STALENESS_LIMIT: usize = 8;

/// A defender's last monitored view of the network.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MonitorBelief {
    /// `(state_index, observed_at)` per node; empty until the first monitor.
    pub nodes: Vec<Option<(u8, usize)>>,
}

impl MonitorBelief {
    pub fn update(&mut self, obs: &CyberObservation) {
        if let Some(states) = &obs.node_states {
            self.nodes = states.iter().map(|&s| Some((s, obs.step))).collect();
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.iter().all(Option::is_none)
    }

    /// Steps since the oldest belief entry, or `None` when nothing is known.
    pub fn age(&self, now: usize) -> Option<usize> {
        self.nodes
            .iter()
            .flatten()
            .map(|&(_, at)| now.saturating_sub(at))
            .max()
    }

    pub fn states(&self) -> Vec<Option<u8>> {
        self.nodes.iter().map(|n| n.map(|(s, _)| s)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatchTarget {
    LeastExploited,
    MostExploited,
}

/// Node the policy believes is extremal; ties go to the lowest id.
pub fn target_node(believed: &[Option<u8>], mode: PatchTarget) -> Option<usize> {
    let mut best: Option<(usize, u8)> = None;
    for (i, s) in believed.iter().enumerate() {
        let Some(s) = *s else { continue };
        let better = match (best, mode) {
            (None, _) => true,
            (Some((_, b)), PatchTarget::LeastExploited) => s < b,
            (Some((_, b)), PatchTarget::MostExploited) => s > b,
        };
        if better {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

/// Monitors when its belief is missing or stale, otherwise walks to its
/// target node and patches it.
pub struct TargetPatchPolicy {
    mode: PatchTarget,
    belief: MonitorBelief,
}

impl TargetPatchPolicy {
    pub fn new(mode: PatchTarget) -> Self {
        TargetPatchPolicy {
            mode,
            belief: MonitorBelief::default(),
        }
    }

    pub fn belief(&self) -> &MonitorBelief {
        &self.belief
    }

    pub fn decide(&self, obs: &CyberObservation) -> CyberAction {
        match self.belief.age(obs.step) {
            None => return CyberAction::Monitor,
            Some(age) if age >= STALENESS_LIMIT => return CyberAction::Monitor,
            _ => {}
        }
        match target_node(&self.belief.states(), self.mode) {
            None => CyberAction::Monitor,
            Some(v) if v == obs.own.location => CyberAction::Patch,
            Some(v) => CyberAction::Move(v),
        }
    }
}

impl Policy<Cyber> for TargetPatchPolicy {
    fn name(&self) -> &str {
        match self.mode {
            PatchTarget::LeastExploited => "patched",
            PatchTarget::MostExploited => "exploited",
        }
    }

    fn reset(&mut self) {
        self.belief = MonitorBelief::default();
    }

    fn act(&mut self, obs: &CyberObservation, _rng: &mut RngStream) -> CyberAction {
        self.belief.update(obs);
        if !obs.own.present {
            return CyberAction::Noop;
        }
        self.decide(obs)
    }
}

impl Baselines for Cyber {
    fn baseline_names() -> &'static [&'static str] {
        &["noop", "random", "patched", "exploited"]
    }

    fn baseline(name: &str) -> Option<Box<dyn Policy<Self>>> {
        match name {
            "patched" => Some(Box::new(TargetPatchPolicy::new(PatchTarget::LeastExploited))),
            "exploited" => Some(Box::new(TargetPatchPolicy::new(PatchTarget::MostExploited))),
            other => common(other),
        }
    }
}
