use serde::{Deserialize, Serialize};

use super::wilcoxon::{signed_rank, WilcoxonError};
use super::{BatchResult, EvalError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairCell {
    Diagonal,
    /// Every paired difference was zero; shown as not significant.
    NoInformation,
    Tested { w: f64, p: f64, significant: bool },
}

impl PairCell {
    pub fn significant(&self) -> bool {
        matches!(self, PairCell::Tested { significant: true, .. })
    }

    pub fn p(&self) -> Option<f64> {
        match self {
            PairCell::Tested { p, .. } => Some(*p),
            PairCell::NoInformation => Some(1.0),
            PairCell::Diagonal => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignificanceMatrix {
    pub policies: Vec<String>,
    pub alpha: f64,
    pub cells: Vec<Vec<PairCell>>,
}

/// Checks that batches ran on the same config with the same seed pairing.
pub fn check_paired(batches: &[&BatchResult]) -> Result<(), EvalError> {
    let Some(first) = batches.first() else { return Ok(()) };
    for b in &batches[1..] {
        let (h, f) = (&b.header, &first.header);
        if h.config_digest != f.config_digest {
            return Err(EvalError::Mismatch(format!(
                "'{}' ran on config {} but '{}' on {}",
                h.policy, h.config_digest, f.policy, f.config_digest
            )));
        }
        if h.base_seed != f.base_seed || h.n != f.n {
            return Err(EvalError::Mismatch(format!(
                "'{}' used seed {} x {} episodes but '{}' used seed {} x {}",
                h.policy, h.base_seed, h.n, f.policy, f.base_seed, f.n
            )));
        }
    }
    Ok(())
}

/// Seed-paired rewards of two batches, skipping pairs where either crashed.
pub fn paired_rewards(a: &BatchResult, b: &BatchResult) -> (Vec<f64>, Vec<f64>) {
    a.records
        .iter()
        .zip(&b.records)
        .filter(|(x, y)| !x.crashed && !y.crashed)
        .map(|(x, y)| (x.cumulative_reward, y.cumulative_reward))
        .unzip()
}

pub fn significance_matrix(batches: &[&BatchResult], alpha: f64) -> Result<SignificanceMatrix, EvalError> {
    check_paired(batches)?;
    let k = batches.len();
    let mut cells = vec![vec![PairCell::Diagonal; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let (x, y) = paired_rewards(batches[i], batches[j]);
            let cell = match signed_rank(&x, &y) {
                Ok(t) => PairCell::Tested { w: t.w, p: t.p, significant: t.p < alpha },
                Err(WilcoxonError::NoInformation) => PairCell::NoInformation,
                Err(e @ WilcoxonError::LengthMismatch { .. }) => return Err(EvalError::Mismatch(e.to_string())),
            };
            cells[i][j] = cell.clone();
            cells[j][i] = cell;
        }
    }
    Ok(SignificanceMatrix {
        policies: batches.iter().map(|b| b.header.policy.clone()).collect(),
        alpha,
        cells,
    })
}
