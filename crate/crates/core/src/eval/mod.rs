//! Evaluation pipeline: batches, summaries and significance tests.

pub mod batch;
pub mod significance;
pub mod stats;
pub mod wilcoxon;

use thiserror::Error;

use crate::config::{ConfigError, Domain};
use crate::posg::runner::RunError;

pub use batch::{policy_names, run_batch, run_batch_config, run_single, BatchResult, EpisodeRecord};
pub use significance::{significance_matrix, PairCell, SignificanceMatrix};
pub use stats::{aggregate, reward_over_time, Estimate, MetricSummary};
pub use wilcoxon::{signed_rank, Wilcoxon, WilcoxonError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown {domain} policy '{name}' (known: {known})")]
    UnknownPolicy { domain: Domain, name: String, known: String },
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("a batch needs at least one episode")]
    Empty,
    #[error("line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("batches are not comparable: {0}")]
    Mismatch(String),
}
