//! Dynamic ridesharing with stochastic passenger arrivals.

pub mod baselines;
pub mod env;

pub use env::spaces::{RideshareAction, RideshareObservation};
pub use env::structures::{Lifecycle, RideshareConfig, RideshareState};
pub use env::transitions::RideshareEvent;
pub use env::Rideshare;
