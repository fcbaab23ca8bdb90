//! Wilcoxon signed-rank test on paired samples, two-sided.
//!
//! Zero differences are dropped and tied magnitudes share average ranks. Up
//! to [`EXACT_LIMIT`] non-zero pairs, the p-value comes from the exact null
//! distribution of W+ given the observed ranks; above it, from the normal
//! approximation with tie and continuity corrections.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WilcoxonError {
    #[error("paired samples differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("every paired difference is zero; the test carries no information")]
    NoInformation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    Normal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wilcoxon {
    /// min(W+, W-).
    pub w: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Pairs left after dropping zero differences.
    pub n: usize,
    pub p: f64,
    pub method: Method,
}

/// Average ranks (1-based) of `values`, which must be sorted ascending.
fn average_ranks(sorted: &[f64]) -> Vec<f64> {
    let mut ranks = vec![0.0; sorted.len()];
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        ranks[i..j].fill(avg);
        i = j;
    }
    ranks
}

/// Non-zero differences as (|d|, positive) sorted by magnitude, with their ranks.
pub fn signed_ranks(x: &[f64], y: &[f64]) -> Result<Vec<(f64, bool)>, WilcoxonError> {
    if x.len() != y.len() {
        return Err(WilcoxonError::LengthMismatch { left: x.len(), right: y.len() });
    }
    let mut diffs: Vec<(f64, bool)> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .map(|d| (d.abs(), d > 0.0))
        .collect();
    if diffs.is_empty() {
        return Err(WilcoxonError::NoInformation);
    }
    diffs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ranks = average_ranks(&diffs.iter().map(|d| d.0).collect::<Vec<_>>());
    Ok(ranks.into_iter().zip(diffs).map(|(r, (_, pos))| (r, pos)).collect())
}

/// P(W+ <= w) under the null, by counting subsets of the (doubled, hence
/// integral) ranks.
fn exact_lower_tail(ranks: &[f64], w: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; total + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            let c = counts[s];
            if c != 0.0 {
                counts[s + r] += c;
            }
        }
        reach += r;
    }
    let limit = (w * 2.0).round() as usize;
    let hits: f64 = counts.iter().take(limit + 1).sum();
    hits / 2f64.powi(ranks.len() as i32)
}

pub fn signed_rank(x: &[f64], y: &[f64]) -> Result<Wilcoxon, WilcoxonError> {
    let ranked = signed_ranks(x, y)?;
    let n = ranked.len();
    let w_plus = ranked.iter().filter(|r| r.1).fold(0.0, |acc, r| acc + r.0);
    let w_minus = ranked.iter().filter(|r| !r.1).fold(0.0, |acc, r| acc + r.0);
    let w = w_plus.min(w_minus);
    let ranks: Vec<f64> = ranked.iter().map(|r| r.0).collect();

    let (p, method) = if n <= EXACT_LIMIT {
        ((2.0 * exact_lower_tail(&ranks, w)).min(1.0), Method::Exact)
    } else {
        let nf = n as f64;
        let mean = nf * (nf + 1.0) / 4.0;
        let mut tie_term = 0.0;
        let mut i = 0;
        while i < ranks.len() {
            let j = ranks[i..].iter().take_while(|&&r| r == ranks[i]).count();
            let t = j as f64;
            tie_term += t * t * t - t;
            i += j;
        }
        let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
        let z = ((w - mean + 0.5) / var.sqrt()).min(0.0);
        let normal = Normal::standard();
        ((2.0 * normal.cdf(z)).min(1.0), Method::Normal)
    };
    Ok(Wilcoxon { w, w_plus, w_minus, n, p, method })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diffs(d: &[f64]) -> Result<Wilcoxon, WilcoxonError> {
        signed_rank(d, &vec![0.0; d.len()])
    }

    #[test]
    fn three_positive_differences() {
        let r = diffs(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.w, 0.0);
        assert!(r.w.is_sign_positive());
        assert_eq!(r.w_plus, 6.0);
        assert_eq!(r.p, 0.25);
    }

    #[test]
    fn five_positive_differences() {
        assert_eq!(diffs(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap().p, 0.0625);
    }

    #[test]
    fn identical_samples_carry_no_information() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(signed_rank(&x, &x), Err(WilcoxonError::NoInformation));
        assert!(matches!(signed_rank(&x, &x[..2]), Err(WilcoxonError::LengthMismatch { .. })));
    }

    #[test]
    fn ties_get_average_ranks() {
        let ranked = signed_ranks(&[1.0, -1.0, 2.0, 0.0], &[0.0; 4]).unwrap();
        let ranks: Vec<f64> = ranked.iter().map(|r| r.0).collect();
        assert_eq!(ranks, vec![1.5, 1.5, 3.0]);
    }

    #[test]
    fn balanced_signs_give_p_one() {
        let r = diffs(&[1.0, -1.0]).unwrap();
        assert_eq!(r.p, 1.0);
    }

    #[test]
    fn large_samples_use_normal_approximation() {
        let d: Vec<f64> = (1..=40).map(|i| if i % 5 == 0 { -(i as f64) } else { i as f64 }).collect();
        let r = diffs(&d).unwrap();
        assert_eq!(r.method, Method::Normal);
        assert!(r.p > 0.0 && r.p < 0.01, "{}", r.p);
    }

    #[test]
    fn approximation_is_close_to_exact_at_the_cutoff() {
        let d: Vec<f64> = (1..=25).map(|i| if i % 3 == 0 { -(i as f64) } else { i as f64 }).collect();
        let exact = diffs(&d).unwrap();
        let mut longer = d.clone();
        longer.push(0.5);
        let approx = diffs(&longer).unwrap();
        assert_eq!(exact.method, Method::Exact);
        assert_eq!(approx.method, Method::Normal);
        assert!((exact.p - approx.p).abs() < 0.02, "{} vs {}", exact.p, approx.p);
    }
}
