//! Wildfire suppression.
//!
//! Laid out as `env/{structures, spaces, transitions}` plus `baselines`, with
//! shipped benchmark configurations under `configs/`.

pub mod baselines;
pub mod env;

pub use env::spaces::{WildfireAction, WildfireObservation};
pub use env::structures::{FireStatus, WildfireConfig, WildfireState};
pub use env::transitions::WildfireEvent;
pub use env::Wildfire;
