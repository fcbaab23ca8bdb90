//! Open multi-agent benchmark environments (wildfire suppression, network
//! defense, ridesharing) behind one partially observable stochastic game
//! interface, with baselines and a seeded evaluation pipeline.

pub mod baselines;
pub mod config;
pub mod cyber;
pub mod eval;
pub mod posg;
pub mod report;
pub mod rideshare;
pub mod wildfire;

pub use config::{parse_config, ConfigError, Domain, EnvConfig};
