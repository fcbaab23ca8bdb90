//! Cybersecurity defense over a directed network of subnetworks.

pub mod baselines;
pub mod env;

pub use env::spaces::{AttackerAction, CyberAction, CyberObservation};
pub use env::structures::{CyberConfig, CyberState, STATE_VALUES};
pub use env::transitions::CyberEvent;
pub use env::Cyber;
