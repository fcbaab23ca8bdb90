//! Tables, plots and replay rendering built from evaluation results.

pub mod render;
pub mod svg;

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::config::Domain;
use crate::eval::{MetricSummary, PairCell, SignificanceMatrix};

/// The action class plotted against reward in activity scatters.
pub fn activity_class(domain: Domain) -> &'static str {
    match domain {
        Domain::Wildfire => "fight",
        Domain::Cybersecurity => "patch",
        Domain::Rideshare => "accept",
    }
}

fn write_csv(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigCell {
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    pub policy: String,
    /// One entry per leaderboard config, `None` where the policy was not run.
    pub cells: Vec<Option<ConfigCell>>,
    /// Sum of the per-config means.
    pub total: f64,
    /// Per-config standard errors combined in quadrature.
    pub total_std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Leaderboard {
    pub configs: Vec<String>,
    pub rows: Vec<LeaderboardRow>,
}

/// Rows and columns keep first-appearance order of policies and configs.
pub fn leaderboard(summaries: &[(String, MetricSummary)]) -> Leaderboard {
    let mut configs: Vec<String> = Vec::new();
    let mut policies: Vec<String> = Vec::new();
    for (c, s) in summaries {
        if !configs.contains(c) {
            configs.push(c.clone());
        }
        if !policies.contains(&s.policy) {
            policies.push(s.policy.clone());
        }
    }
    let rows = policies
        .into_iter()
        .map(|policy| {
            let cells: Vec<Option<ConfigCell>> = configs
                .iter()
                .map(|c| {
                    summaries
                        .iter()
                        .find(|(sc, s)| sc == c && s.policy == policy)
                        .map(|(_, s)| ConfigCell { mean: s.reward.mean, std_error: s.reward.std_error })
                })
                .collect();
            let total = cells.iter().flatten().map(|c| c.mean).sum();
            let total_std_error = cells.iter().flatten().map(|c| c.std_error * c.std_error).sum::<f64>().sqrt();
            LeaderboardRow { policy, cells, total, total_std_error }
        })
        .collect();
    Leaderboard { configs, rows }
}

impl Leaderboard {
    /// Numeric columns at full precision; `mean ± se` display lives in [`Leaderboard::to_text`].
    pub fn to_csv(&self) -> String {
        let mut header = vec!["policy".to_string()];
        for c in &self.configs {
            header.push(format!("{c}_mean"));
            header.push(format!("{c}_se"));
        }
        header.extend(["total_mean".to_string(), "total_se".to_string()]);
        let rows = self.rows.iter().map(|r| {
            let mut line = vec![r.policy.clone()];
            for cell in &r.cells {
                match cell {
                    Some(c) => line.extend([c.mean.to_string(), c.std_error.to_string()]),
                    None => line.extend([String::new(), String::new()]),
                }
            }
            line.extend([r.total.to_string(), r.total_std_error.to_string()]);
            line
        });
        write_csv(std::iter::once(header).chain(rows))
    }

    pub fn to_text(&self) -> String {
        let mut header = vec!["policy".to_string()];
        header.extend(self.configs.iter().cloned());
        header.push("total".into());
        let mut table = vec![header];
        for r in &self.rows {
            let mut line = vec![r.policy.clone()];
            for cell in &r.cells {
                line.push(match cell {
                    Some(c) => format!("{:.2} ± {:.2}", c.mean, c.std_error),
                    None => "-".into(),
                });
            }
            line.push(format!("{:.2} ± {:.2}", r.total, r.total_std_error));
            table.push(line);
        }
        let widths: Vec<usize> = (0..table[0].len())
            .map(|i| table.iter().map(|l| l[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for l in &table {
            let cells: Vec<String> = l
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        out
    }
}

/// Long-format pairwise table: one line per unordered policy pair.
pub fn significance_csv(matrices: &[(String, SignificanceMatrix)]) -> String {
    let header = ["config", "policy_a", "policy_b", "status", "w", "p", "significant", "alpha"];
    let mut rows = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    for (config, m) in matrices {
        for i in 0..m.policies.len() {
            for j in (i + 1)..m.policies.len() {
                let (status, w, p, sig) = match &m.cells[i][j] {
                    PairCell::Tested { w, p, significant } => ("tested", w.to_string(), p.to_string(), *significant),
                    PairCell::NoInformation => ("no_information", String::new(), "1".into(), false),
                    PairCell::Diagonal => continue,
                };
                rows.push(vec![
                    config.clone(),
                    m.policies[i].clone(),
                    m.policies[j].clone(),
                    status.to_string(),
                    w,
                    p,
                    sig.to_string(),
                    m.alpha.to_string(),
                ]);
            }
        }
    }
    write_csv(rows)
}

/// `(config, policy, activity share in %, mean reward)` rows.
pub fn activity_points(summaries: &[(String, MetricSummary)]) -> Vec<(String, String, f64, f64)> {
    summaries
        .iter()
        .map(|(c, s)| {
            let share = s.action_proportions.get(activity_class(s.domain)).copied().unwrap_or(0.0);
            (c.clone(), s.policy.clone(), 100.0 * share, s.reward.mean)
        })
        .collect()
}

pub fn activity_csv(summaries: &[(String, MetricSummary)]) -> String {
    let header = ["config", "policy", "activity_class", "activity_pct", "mean_reward"];
    let rows = activity_points(summaries).into_iter().zip(summaries).map(|((c, p, share, mean), (_, s))| {
        vec![c, p, activity_class(s.domain).to_string(), share.to_string(), mean.to_string()]
    });
    write_csv(std::iter::once(header.iter().map(|s| s.to_string()).collect()).chain(rows))
}

pub fn reward_over_time_csv(series: &[(String, String, Vec<(usize, f64)>)]) -> String {
    let header = ["config", "policy", "step", "mean_reward"];
    let rows = series.iter().flat_map(|(c, p, pts)| {
        pts.iter().map(move |(t, v)| vec![c.clone(), p.clone(), t.to_string(), v.to_string()])
    });
    write_csv(std::iter::once(header.iter().map(|s| s.to_string()).collect()).chain(rows))
}

/// Per-policy summary lines for a result set, as written to `summary.json`.
pub fn summaries_json(summaries: &[(String, MetricSummary)]) -> String {
    let map: Vec<BTreeMap<&str, serde_json::Value>> = summaries
        .iter()
        .map(|(c, s)| {
            BTreeMap::from([
                ("config", serde_json::Value::String(c.clone())),
                ("summary", serde_json::to_value(s).expect("serializable")),
            ])
        })
        .collect();
    serde_json::to_string_pretty(&map).expect("serializable") + "\n"
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub policy: String,
    pub file: String,
    pub episodes: usize,
    pub crashes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub domain: Domain,
    pub config_name: String,
    pub config_digest: String,
    pub base_seed: u64,
    pub runs: usize,
    /// Episode `i` of every file used stream `derive_stream(base_seed, i)`.
    pub stream_derivation: String,
    pub results: Vec<ManifestEntry>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::Estimate;

    fn summary(policy: &str, mean: f64, se: f64) -> MetricSummary {
        MetricSummary {
            domain: Domain::Wildfire,
            config_digest: "d".into(),
            policy: policy.into(),
            episodes: 4,
            crashes: 0,
            reward: Estimate { mean, std_error: se, n: 4, std_error_defined: true },
            action_proportions: BTreeMap::from([("fight".into(), 0.25), ("noop".into(), 0.75)]),
            metrics: BTreeMap::new(),
        }
    }

    #[test]
    fn totals_and_quadrature() {
        let s = vec![
            ("ws1".to_string(), summary("a", 1.0, 3.0)),
            ("ws2".to_string(), summary("a", 2.5, 4.0)),
            ("ws1".to_string(), summary("b", -1.0, 0.0)),
        ];
        let lb = leaderboard(&s);
        assert_eq!(lb.configs, vec!["ws1", "ws2"]);
        assert_eq!(lb.rows[0].total, 3.5);
        assert_eq!(lb.rows[0].total_std_error, 5.0);
        assert_eq!(lb.rows[1].cells[1], None);
        let csv = lb.to_csv();
        assert_eq!(csv.lines().next().unwrap(), "policy,ws1_mean,ws1_se,ws2_mean,ws2_se,total_mean,total_se");
        assert_eq!(csv.lines().nth(2).unwrap(), "b,-1,0,,,-1,0");
        assert!(lb.to_text().contains("3.50 ± 5.00"));
    }

    #[test]
    fn activity_uses_domain_class() {
        let pts = activity_points(&[("c".into(), summary("a", 1.0, 0.0))]);
        assert_eq!(pts[0].2, 25.0);
    }

    #[test]
    fn significance_rows_skip_diagonal() {
        let m = SignificanceMatrix {
            policies: vec!["a".into(), "b".into()],
            alpha: 0.05,
            cells: vec![
                vec![PairCell::Diagonal, PairCell::NoInformation],
                vec![PairCell::NoInformation, PairCell::Diagonal],
            ],
        };
        let csv = significance_csv(&[("c".into(), m)]);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.contains("c,a,b,no_information,,1,false,0.05"));
    }
}
