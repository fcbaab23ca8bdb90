//! Reference policies and the name registry the CLI resolves them through.
//!
//! `noop` and `random` work for every domain; each domain adds its own
//! heuristics in its `baselines` module.

use std::marker::PhantomData;

use crate::posg::{DomainAction, Environment, Policy, RngStream};

/// Environments that ship named baseline policies.
pub trait Baselines: Environment + Sized {
    fn baseline_names() -> &'static [&'static str];
    fn baseline(name: &str) -> Option<Box<dyn Policy<Self>>>;
}

/// Always idles.
pub struct NoopPolicy;

impl<E: Environment> Policy<E> for NoopPolicy {
    fn name(&self) -> &str {
        "noop"
    }

    fn act(&mut self, _obs: &E::Observation, _rng: &mut RngStream) -> E::Action {
        E::Action::noop()
    }
}

/// Uniform over the legal actions implied by the observation.
pub struct RandomPolicy<E>(PhantomData<fn() -> E>);

impl<E> RandomPolicy<E> {
    pub fn new() -> Self {
        RandomPolicy(PhantomData)
    }
}

impl<E> Default for RandomPolicy<E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<E: Environment> Policy<E> for RandomPolicy<E> {
    fn name(&self) -> &str {
        "random"
    }

    fn act(&mut self, obs: &E::Observation, rng: &mut RngStream) -> E::Action {
        let legal = E::observed_legal_actions(obs);
        legal[rng.index(legal.len())]
    }
}

/// The shared `noop`/`random` lookups.
pub fn common<E: Environment + 'static>(name: &str) -> Option<Box<dyn Policy<E>>> {
    match name {
        "noop" => Some(Box::new(NoopPolicy)),
        "random" => Some(Box::new(RandomPolicy::<E>::new())),
        _ => None,
    }
}
