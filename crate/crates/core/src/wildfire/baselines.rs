use super::env::spaces::{WildfireAction, WildfireObservation};
use super::env::Wildfire;
use crate::baselines::{common, Baselines};
use crate::posg::{Policy, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extremal {
    Smallest,
    Largest,
}

/// Fights the adjacent fire of least (or greatest) intensity; ties go to the
/// lowest fight index.
pub struct ExtremalPolicy {
    mode: Extremal,
}

impl ExtremalPolicy {
    pub fn new(mode: Extremal) -> Self {
        ExtremalPolicy { mode }
    }
}

/// Index of the chosen target among `intensities`, or `None` if empty.
pub fn extremal_index(intensities: &[u32], mode: Extremal) -> Option<usize> {
    let mut best: Option<(usize, u32)> = None;
    for (i, &v) in intensities.iter().enumerate() {
        let better = match (best, mode) {
            (None, _) => true,
            (Some((_, b)), Extremal::Smallest) => v < b,
            (Some((_, b)), Extremal::Largest) => v > b,
        };
        if better {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

impl Policy<Wildfire> for ExtremalPolicy {
    fn name(&self) -> &str {
        match self.mode {
            Extremal::Smallest => "smallest",
            Extremal::Largest => "largest",
        }
    }

    fn act(&mut self, obs: &WildfireObservation, _rng: &mut RngStream) -> WildfireAction {
        if obs.legal_actions().len() <= 1 {
            return WildfireAction::Noop;
        }
        let intensities: Vec<u32> = obs.targets().iter().map(|f| f.intensity).collect();
        extremal_index(&intensities, self.mode).map_or(WildfireAction::Noop, WildfireAction::Fight)
    }
}

impl Baselines for Wildfire {
    fn baseline_names() -> &'static [&'static str] {
        &["noop", "random", "smallest", "largest"]
    }

    fn baseline(name: &str) -> Option<Box<dyn Policy<Self>>> {
        match name {
            "smallest" => Some(Box::new(ExtremalPolicy::new(Extremal::Smallest))),
            "largest" => Some(Box::new(ExtremalPolicy::new(Extremal::Largest))),
            other => common(other),
        }
    }
}
